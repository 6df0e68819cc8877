import asyncio

import pytest
from fastapi.testclient import TestClient
from sqlalchemy.pool import NullPool

from sparse_evolve.api import deps
from sparse_evolve.core.config import settings
from sparse_evolve.core.database import create_tables, make_engine, make_sessionmaker
from sparse_evolve.crud.experiment_run import experiment_run as crud_experiment_run
from sparse_evolve.engine.experiments import run_experiment
from sparse_evolve.main import app
from sparse_evolve.schemas.experiment import ExperimentSpec

API = settings.API_V1_STR
K4 = {"root_size": 0, "ext_size": 4, "ext_edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}
K4_PENDANT = {**K4, "ext_size": 5, "ext_edges": K4["ext_edges"] + [[3, 4]]}
PENDANT = {"root_size": 1, "ext_size": 1, "root_edges": [[0, 0]]}


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def recorded_runs(tmp_path_factory):
    url = f"sqlite+aiosqlite:///{tmp_path_factory.mktemp('api') / 'runs.db'}"
    reports = [
        run_experiment(
            ExperimentSpec.model_validate(
                {"kind": "slope", "alpha": "3/4", "extension": PENDANT, "trials": 2, "checkpoints": [10, 20], "tau0": 3}
            )
        ).report,
        run_experiment(ExperimentSpec.model_validate({"kind": "clique", "alpha": "3/4", "trials": 50})).report,
    ]

    async def populate():
        engine = make_engine(url, poolclass=NullPool)
        try:
            await create_tables(engine)
            async with make_sessionmaker(engine)() as db:
                return [(await crud_experiment_run.record_report(db, report=r)).id for r in reports]
        finally:
            await engine.dispose()

    ids = asyncio.run(populate())
    engine = make_engine(url, poolclass=NullPool)
    sessions = make_sessionmaker(engine)

    async def override_get_db():
        async with sessions() as session:
            yield session

    app.dependency_overrides[deps.get_db] = override_get_db
    yield ids
    app.dependency_overrides.pop(deps.get_db, None)


def test_root(client):
    body = client.get("/").json()
    assert body["build"] == settings.BUILD_TAG


class TestCalculus:
    def test_classify(self, client):
        response = client.post(f"{API}/calculus/classify", json={"extension": K4, "alpha": "3/4"})
        assert response.status_code == 200
        data = response.json()["data"]
        assert data["delta"] == "-1/2"
        assert data["classification"]["is_rigid"] is True
        assert data["rigid_subset"] == [0, 1, 2, 3]
        assert data["automorphisms"] == 24

    def test_decompose_rejects_rigid(self, client):
        response = client.post(f"{API}/calculus/decompose", json={"extension": K4, "alpha": "3/4"})
        assert response.status_code == 422
        body = response.json()
        assert body["success"] is False
        assert body["data"]["error"] == "PreconditionError"

    def test_decompose(self, client):
        response = client.post(f"{API}/calculus/decompose", json={"extension": K4_PENDANT, "alpha": "3/4"})
        assert response.status_code == 200
        assert response.json()["data"]["decomposition_subset"] == [0, 1, 2, 3]

    def test_bad_alpha(self, client):
        response = client.post(f"{API}/calculus/classify", json={"extension": K4, "alpha": "1/1"})
        assert response.status_code == 422


def test_census_count(client):
    graph = {"alpha": "3/4", "T": 3, "edges": [[1, 2], [1, 3], [2, 3]]}
    p2 = {"root_size": 0, "ext_size": 2, "ext_edges": [[0, 1]]}
    response = client.post(f"{API}/census/count", json={"graph": graph, "extension": p2})
    assert response.status_code == 200
    assert response.json()["data"] == {"embeddings": 6, "copies_num": 3, "copies_den": 1}


def test_census_bad_roots(client):
    graph = {"alpha": "3/4", "T": 3, "edges": [[1, 2]]}
    response = client.post(f"{API}/census/count", json={"graph": graph, "extension": PENDANT, "roots": [1, 2]})
    assert response.status_code == 400
    assert response.json()["data"]["error"] == "InvalidArgumentError"


def test_census_misshapen_graph(client):
    graph = {"alpha": "3/4", "T": 3, "edges": [[1, "x"]]}
    response = client.post(f"{API}/census/count", json={"graph": graph, "extension": PENDANT, "roots": [1]})
    assert response.status_code == 422


class TestExpectation:
    def test_closed(self, client):
        query = {"extension": PENDANT, "alpha": "3/4", "tau0": 1, "T": 16}
        response = client.post(f"{API}/expectation/closed", json=query)
        assert response.status_code == 200
        data = response.json()["data"]
        assert data["value"] == pytest.approx(4.0, rel=1e-12)
        assert data["theta"]["dominant_T_exponent"] == "1/4"

    def test_oracle(self, client):
        query = {"extension": PENDANT, "alpha": "3/4", "tau0": 1, "T": 3}
        response = client.post(f"{API}/expectation/oracle", json=query)
        assert response.json()["data"] == pytest.approx(2 ** -0.75 + 3 ** -0.75, rel=1e-12)

    def test_oracle_budget(self, client, monkeypatch):
        monkeypatch.setattr(settings, "ORACLE_WORK_BUDGET", 100)
        query = {"extension": PENDANT, "alpha": "3/4", "tau0": 1, "T": 1000}
        response = client.post(f"{API}/expectation/oracle", json=query)
        assert response.status_code == 413
        assert response.json()["data"]["error"] == "InfeasibleOracleError"

    def test_degenerate(self, client):
        ext = {"root_size": 2, "ext_size": 1, "root_edges": [[0, 0], [1, 0]]}
        response = client.post(f"{API}/expectation/closed", json={"extension": ext, "alpha": "1/2", "tau0": 2, "T": 9})
        assert response.status_code == 422
        assert response.json()["data"]["error"] == "DegeneracyError"


class TestRuns:
    def test_list(self, client, recorded_runs):
        data = client.get(f"{API}/runs/").json()["data"]
        assert {run["id"] for run in data} == set(recorded_runs)

    def test_filter_by_kind(self, client, recorded_runs):
        data = client.get(f"{API}/runs/", params={"kind": "clique"}).json()["data"]
        assert [run["id"] for run in data] == [recorded_runs[1]]
        assert data[0]["summary"]["oracle_probability"] == pytest.approx((2 * 3**2 * 4**3) ** -0.75)

    def test_get(self, client, recorded_runs):
        data = client.get(f"{API}/runs/{recorded_runs[0]}").json()["data"]
        assert data["kind"] == "slope" and data["alpha"] == "3/4"
        assert data["spec"]["checkpoints"] == [10, 20]

    def test_missing(self, client, recorded_runs):
        response = client.get(f"{API}/runs/no-such-run")
        assert response.status_code == 404
        assert response.json()["detail"] == "Experiment run not found"
