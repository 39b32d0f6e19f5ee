import pytest

from cyberlang.compiler import bundled_dialect
from cyberlang.core import SignRegistry
from cyberlang.fdsg import parse
from cyberlang.ids import IdGenerator
from cyberlang.resources import data_path
from cyberlang.semantics import MappingRegistry

EXAMPLE_CANONICAL = (
    "[P: sector=A7, altitude=50m, duration=1800s] "
    "[S: authorisation=alpha, mission-id=SAR-2026-047] "
    "[T: intent=reconnaissance, confidence=0.92, urgency=high] "
    "[C: algorithm=path-optimize-v3, datasource=live-weather-api] "
    "[+O: P>S, T||C]"
)

# as written in the worked example, Unicode operators and the Greek letter
EXAMPLE_UNICODE = (
    "[P: sector=A7, altitude=50m, duration=1800s] "
    "[S: authorisation=α, mission-id=SAR-2026-047] "
    "[T: intent=reconnaissance, confidence=0.92, urgency=high] "
    "[C: algorithm=path-optimize-v3, datasource=live-weather-api] "
    "[⊕Ω: P≻S, T∥C]"
)

DANGER_SOURCE = (
    "[P: sector=B2, altitude=30m, hazard=danger] [S: mission-id=SAR-2026-048] "
    "[T: intent=reconnaissance, urgency=high] [+O: P>S]"
)


@pytest.fixture
def ids():
    return IdGenerator(0)


@pytest.fixture
def example_stmt(ids):
    return parse(EXAMPLE_UNICODE, ids=ids)


@pytest.fixture
def danger_stmt(ids):
    return parse(DANGER_SOURCE, ids=ids)


@pytest.fixture
def dialect():
    return bundled_dialect()


@pytest.fixture
def signs():
    """Registry in which "danger" has two senses."""
    return SignRegistry.load(data_path("signs.json"))


@pytest.fixture
def signs_unambiguous():
    return SignRegistry.load(data_path("signs-unambiguous.json"))


@pytest.fixture
def mappings():
    return MappingRegistry.load(data_path("mappings.json"))
