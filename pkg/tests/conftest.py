import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import evotrace as et


@pytest.fixture(scope="session")
def small_run():
    """A small but fully featured NSGA-II run (reserved sets, mutations)."""
    problem = et.get_problem("dtlz2", n=6)
    config = et.make_run_config(problem, mu=12, generations=6, seed=11)
    return et.run(problem, "nsga2", config)


@pytest.fixture(scope="session")
def small_sms_run():
    problem = et.get_problem("dtlz2", n=6)
    config = et.make_run_config(problem, mu=10, generations=5, seed=3)
    return et.run(problem, "smsemoa", config)


@pytest.fixture(scope="session")
def saved_run(small_run, tmp_path_factory):
    directory = tmp_path_factory.mktemp("runs") / "demo"
    from evotrace.store import save_run

    save_run(small_run, directory)
    return directory
