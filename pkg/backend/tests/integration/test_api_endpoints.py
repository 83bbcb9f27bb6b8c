"""
Integration tests for the HTTP API.
"""

import pytest
from arthurkit.services.serialization import read_json
from httpx import ASGITransport, AsyncClient

SP10 = {"kind": "Sp", "symbol": "Sp:{([3,-3];3,+),([1,-1];1,-),([0,0];0,-)}@rho"}
SC_THREE_HALVES = {"kind": "SO", "chains": [{"rho": "rho", "alpha": "3/2", "eta": -1}]}


class TestService:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "healthy", "version": "0.4.0"}

    def test_root(self, client):
        data = client.get("/").json()
        assert data["message"] == "arthurkit"
        assert data["docs"] == "/docs"

    @pytest.mark.asyncio
    async def test_health_async(self):
        from arthurkit.main import app

        async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
            resp = await ac.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "healthy"


class TestEmsEndpoints:
    def test_validate(self, client):
        resp = client.post("/ems/validate", json=SP10)
        assert resp.status_code == 200
        data = resp.json()
        assert data["valid"] is True
        assert data["nonvanishing"] is True

    def test_pi(self, client):
        resp = client.post("/ems/pi", json=SP10)
        assert resp.status_code == 200
        data = resp.json()
        assert data["text"] == "L(Δ[-3,-3], Δ[-1,-2], Δ[0,-1]; π(0⁺))"
        assert data["ldata"]["kind"] == "Sp"

    def test_pi_variant2(self, client, fixtures_dir):
        resp = client.post("/ems/pi", params={"variant2": True}, json=read_json(fixtures_dir / "ems-two-rows.json"))
        assert resp.json()["text"] == "L(Δ[1,-3], Δ[0,-1]; π(2⁺))"

    def test_dual(self, client):
        resp = client.post("/ems/dual", json=SP10)
        assert resp.json()["symbol"] == "Sp:{([0,0];0,-),([1,1];0,-),([3,3];0,+)}@rho"

    def test_intersection(self, client):
        data = client.post("/ems/intersection", json=SP10).json()
        assert SP10["symbol"] in data["members"]
        assert data["psi_max"]

    def test_invalid_ems(self, client):
        resp = client.post("/ems/validate", json={"kind": "Sp", "symbol": "Sp:{([0,0];0,-)}@rho"})
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "invalid_input"

    def test_unparsable_symbol(self, client):
        resp = client.post("/ems/validate", json={"kind": "Sp", "symbol": "Sp:{([0,0];0"})
        assert resp.status_code == 422
        assert resp.json()["detail"]["error"] == "parse_error"

    def test_float_rejected(self, client):
        doc = {"kind": "Sp", "blocks": [{"rho": "rho", "rows": [{"A": 0.5, "B": "0", "l": 0}]}]}
        assert client.post("/ems/validate", json=doc).status_code == 422


class TestPacketEndpoints:
    def test_tempered_packet(self, client):
        doc = {"kind": "Sp", "summands": [{"rho": "rho", "a": a, "b": 1} for a in (1, 3, 5)]}
        resp = client.post("/packets", json=doc)
        assert resp.status_code == 200
        assert resp.json()["size"] == 4

    def test_bad_parity(self, client):
        doc = {"kind": "Sp", "summands": [{"rho": "rho", "a": 2, "b": 1, "mult": 2}, {"rho": "rho", "a": 1, "b": 1}]}
        assert client.post("/packets", json=doc).status_code == 400


class TestArthurEndpoints:
    @pytest.mark.parametrize(
        "name, expected",
        [("ldata-sp-chain135.json", True), ("ldata-so31-not-arthur.json", False)],
    )
    def test_decide(self, client, fixtures_dir, name, expected):
        resp = client.post("/arthur", json=read_json(fixtures_dir / name))
        assert resp.status_code == 200
        assert resp.json()["arthur"] is expected
        if expected:
            assert resp.json()["rejected"] == []

    def test_decide_v2(self, client, fixtures_dir):
        resp = client.post("/arthur", params={"v2": True}, json=read_json(fixtures_dir / "ldata-so31-arthur.json"))
        assert resp.json()["arthur"] is True

    def test_decide_lists_rejected(self, client, fixtures_dir):
        resp = client.post("/arthur", params={"v2": True}, json=read_json(fixtures_dir / "ldata-so31-not-arthur.json"))
        assert resp.status_code == 200
        body = resp.json()
        assert body["arthur"] is False
        assert body["rejected"]
        assert all(item["ems"].endswith("}@rho") and item["reason"] for item in body["rejected"])


class TestCorankEndpoints:
    def test_classify(self, client, fixtures_dir):
        body = {"pi": read_json(fixtures_dir / "ldata-corank1-character.json"), "sc": SC_THREE_HALVES}
        resp = client.post("/corank/classify", json=body)
        assert resp.status_code == 200
        assert resp.json()["parity"] == "goodParity"

    def test_report(self, client):
        resp = client.post("/corank/report", json={"sc": SC_THREE_HALVES, "rho": "rho", "corank": 1})
        assert resp.status_code == 200
        data = resp.json()
        assert data["alpha"] == "3/2"
        assert data["mismatches"] == 0

    def test_report_markdown(self, client):
        resp = client.post("/corank/report.md", json={"sc": SC_THREE_HALVES, "rho": "rho", "corank": 1})
        assert resp.status_code == 200
        assert resp.text.startswith("# Corank ≤ 1 along rho (α = 3/2)")
        assert resp.text.endswith("Mismatches: 0\n")

    def test_corank_out_of_range(self, client):
        resp = client.post("/corank/report", json={"sc": SC_THREE_HALVES, "rho": "rho", "corank": 4})
        assert resp.status_code == 422


class TestAbarEndpoints:
    def test_corank_one(self, client):
        resp = client.post("/abar", json={"sc": SC_THREE_HALVES, "rho": "rho", "corank": 1})
        assert resp.status_code == 200
        data = resp.json()
        line = [c for c in data["chambers"] if c["shapes"] == [[1, 1]]]
        assert sorted(c["verdict"] for c in line) == ["equivalentToMinusOne", "equivalentToMinusOne", "inAbar"]

    def test_inline_wall_table(self, client, fixtures_dir):
        body = {
            "sc": SC_THREE_HALVES,
            "rho": "rho",
            "corank": 2,
            "oracle": read_json(fixtures_dir / "walls-so-three-halves.json"),
        }
        data = client.post("/abar", json=body).json()
        speh = [c for c in data["chambers"] if c["shapes"] == [[2, 1]]]
        assert len(speh) == 5

    def test_strict_miss(self, client):
        body = {"sc": SC_THREE_HALVES, "rho": "rho", "corank": 2, "strict": True}
        resp = client.post("/abar", json=body)
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "oracle_miss"

    def test_malformed_wall_table(self, client):
        body = {"sc": SC_THREE_HALVES, "rho": "rho", "corank": 1, "oracle": {"query3": []}}
        assert client.post("/abar", json=body).status_code == 422
