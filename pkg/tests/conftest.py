import pytest
from hypothesis import settings

from ilpdisc import mvee
import mvee_check

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True, scope="session")
def _record_mvee_runs():
    original = mvee.solve_mvee
    mvee.solve_mvee = mvee_check.recording(original)
    yield
    mvee.solve_mvee = original
    assert all(mvee_check.RUNS), "an MVEE run failed its certificate"
