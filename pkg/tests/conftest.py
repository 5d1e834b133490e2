from pathlib import Path

import pytest

from perfchar import PlatformSpec, VectorUnitSpec, load_platform_spec

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def dibona_tx2() -> PlatformSpec:
    return load_platform_spec(FIXTURES / "platforms" / "dibona-tx2.json")


@pytest.fixture(scope="session")
def marenostrum4() -> PlatformSpec:
    return load_platform_spec(FIXTURES / "platforms" / "marenostrum4.json")


@pytest.fixture(scope="session")
def testhost() -> PlatformSpec:
    """Generous declared spec for the machine the suite runs on.

    Benchmark results are checked as upper bounds against this declaration;
    a portable array kernel stays far below a modern two-socket node's peaks.
    """
    return PlatformSpec(
        name="testhost",
        sockets=2,
        cores_per_socket=24,
        frequency=2.1,
        vector_units=(VectorUnitSpec("AVX512", 512, 2, 2),),
        memory_channels=6,
        channel_peak=25.60,
        llc_per_socket=1 << 20,
        l1_size=32768,
        l2_size=1 << 20,
    )
