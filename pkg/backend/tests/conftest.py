"""
Shared test fixtures for the arthurkit test suite.

Provides:
- Test environment variables
- Logging configured once per session
- Supercuspidal bases and extended multi-segments used across modules
- FastAPI TestClient and click CliRunner
- Settings restored between tests
"""

import os
from fractions import Fraction
from pathlib import Path

FIXTURES_DIR = Path(__file__).resolve().parents[2] / "fixtures"

# ---------------------------------------------------------------------------
# 1. Environment variables — MUST be set before any arthurkit imports so that
#    Settings() (which runs at import-time) picks them up.
# ---------------------------------------------------------------------------
os.environ.setdefault("ARTHURKIT_FIXTURES", str(FIXTURES_DIR))
os.environ.setdefault("ARTHURKIT_ENABLE_PROMETHEUS", "false")
os.environ.setdefault("ARTHURKIT_LOG_LEVEL", "WARNING")
os.environ.setdefault("ARTHURKIT_SENTRY_DSN", "")

import pytest  # noqa: E402
from arthurkit.config import settings  # noqa: E402
from arthurkit.engine.core_model import (  # noqa: E402
    TRIVIAL_CUSP,
    CuspLabel,
    EnhancedTempered,
    ExtendedMultiSegment,
    ExtendedSegment,
    SupercuspidalData,
    supercuspidal_from_chains,
)
from arthurkit.enums import Duality, GroupKind  # noqa: E402
from arthurkit.logging_setup import configure_logging  # noqa: E402
from click.testing import CliRunner  # noqa: E402
from fastapi.testclient import TestClient  # noqa: E402

# ---------------------------------------------------------------------------
# 2. Logging
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session", autouse=True)
def _logging():
    """Install the JSON handler once; later configure calls are no-ops."""
    configure_logging("WARNING")


# ---------------------------------------------------------------------------
# 3. Cusps and supercuspidal bases
# ---------------------------------------------------------------------------


@pytest.fixture()
def rho():
    return TRIVIAL_CUSP


@pytest.fixture()
def sym2():
    """A symplectic cusp of GL_2."""
    return CuspLabel("sym2", 2, Duality.SYMPLECTIC)


@pytest.fixture()
def sc_so_three_halves(rho):
    """SO base with α_ρ = 3/2: ρ⊗S_2 (−) plus a symplectic filler sym2⊗S_1 (−)."""
    return supercuspidal_from_chains(GroupKind.ODD_SO, {rho: (Fraction(3, 2), -1)})


@pytest.fixture()
def sc_sp_chain135(rho):
    """Sp base π(0⁻, 1⁺, 2⁻) on the trivial cusp."""
    return SupercuspidalData(
        EnhancedTempered.build(GroupKind.SP, {(rho, 1): (1, -1), (rho, 3): (1, 1), (rho, 5): (1, -1)})
    )


# ---------------------------------------------------------------------------
# 4. Extended multi-segments
# ---------------------------------------------------------------------------


@pytest.fixture()
def sp10(rho):
    """Sp:{([3,-3];3,+),([1,-1];1,-),([0,0];0,-)}@rho, its own absolutely maximal member."""
    return ExtendedMultiSegment.single(
        GroupKind.SP,
        rho,
        [ExtendedSegment(3, -3, 3, 1), ExtendedSegment(1, -1, 1, -1), ExtendedSegment(0, 0, 0, -1)],
    )


@pytest.fixture()
def two_rows(rho):
    """Sp:{([1,0];1,+),([3,1];1,+)}@rho."""
    return ExtendedMultiSegment.single(
        GroupKind.SP, rho, [ExtendedSegment(1, 0, 1, 1), ExtendedSegment(3, 1, 1, 1)]
    )


@pytest.fixture()
def fixtures_dir():
    return FIXTURES_DIR


# ---------------------------------------------------------------------------
# 5. FastAPI TestClient and CLI runner
# ---------------------------------------------------------------------------


@pytest.fixture()
def client():
    """TestClient running the application lifespan."""
    from arthurkit.main import app

    with TestClient(app, raise_server_exceptions=False) as tc:
        yield tc


@pytest.fixture()
def runner():
    return CliRunner()


# ---------------------------------------------------------------------------
# 6. Restore settings between tests
# ---------------------------------------------------------------------------


@pytest.fixture(autouse=True)
def restore_settings():
    """CLI options write into the global settings; put them back."""
    saved = {
        name: getattr(settings, name)
        for name in ("threads", "node_budget", "placement_budget", "oracle_file", "seed", "symbol_ascii")
    }

    yield

    for name, value in saved.items():
        setattr(settings, name, value)
