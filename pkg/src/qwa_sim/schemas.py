import pandera as pa
from pandera import Check, Column

telemetry_schema = pa.DataFrameSchema(
    {
        "step": Column(int, Check.ge(1)),
        "s": Column(float, Check.in_range(0.0, 1.0, include_min=False)),
        "ds": Column(float, Check.gt(0.0)),
        "fidelity": Column(float, Check.in_range(0.0, 1.0)),
        "energy": Column(float),
        "max_bond_dim": Column(int, Check.ge(1)),
        "max_vn_entropy": Column(float, Check.ge(0.0)),
        "max_index_sigma": Column(float, Check.ge(0.0)),
        "m_eff_1e2": Column(int, Check.ge(1)),
        "m_eff_1e3": Column(int, Check.ge(1)),
        "sweeps_used": Column(int, Check.ge(1)),
        "wall_time_ms": Column(int, Check.ge(0)),
    },
    strict=True,
    ordered=True,
)

cut_telemetry_schema = pa.DataFrameSchema(
    {
        "step": Column(int, Check.ge(1)),
        "s": Column(float, Check.in_range(0.0, 1.0, include_min=False)),
        "cut": Column(int, Check.ge(1)),
        "bond_dim": Column(int, Check.ge(1)),
        "vn_entropy": Column(float, Check.ge(0.0)),
        "index_mean": Column(float, Check.ge(1.0)),
        "index_sigma": Column(float, Check.ge(0.0)),
        "m_eff_1e1": Column(int, Check.ge(1)),
        "m_eff_1e2": Column(int, Check.ge(1)),
        "m_eff_1e3": Column(int, Check.ge(1)),
        "chebyshev_m_1e1": Column(int, Check.ge(1)),
        "chebyshev_m_1e2": Column(int, Check.ge(1)),
        "chebyshev_m_1e3": Column(int, Check.ge(1)),
    },
    strict=True,
    ordered=True,
)

aggregate_schema = pa.DataFrameSchema(
    {
        "n": Column(int, Check.ge(1), unique=True),
        "global_max_entropy": Column(float, Check.ge(0.0)),
        "global_max_bond_dim": Column(int, Check.ge(1)),
        "s_peak_entropy": Column(float, nullable=True),
        "solved": Column("Int64", Check.isin([0, 1]), nullable=True),
    },
    checks=Check(lambda df: df["n"].is_monotonic_increasing, error="rows must be sorted by n"),
    strict=True,
    ordered=True,
)


def validate_telemetry(df):
    """Validate a per-step telemetry DataFrame against its schema."""
    return telemetry_schema.validate(df)


def validate_cut_telemetry(df):
    return cut_telemetry_schema.validate(df)


def validate_aggregate(df):
    """Validate a scaling aggregate; ``solved`` is null where brute force was not run."""
    return aggregate_schema.validate(df)
