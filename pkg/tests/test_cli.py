"""Command-line contract: verdicts mirror the library, exit codes are fixed."""

import json

from hypercones import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


class TestEig:
    def test_orthant_sorted_coordinates(self, capsys):
        code, data, _ = run_json(capsys, "eig", "orthant:3", "1,2,3")
        assert code == 0
        assert data["eigs"] == [3.0, 2.0, 1.0000000000000002] or data["eigs"] == [3.0, 2.0, 1.0]
        assert data["rank"] == 3

    def test_l1_direction(self, capsys):
        code, data, _ = run_json(capsys, "eig", "l1", "0,0,1")
        assert code == 0
        assert data["eigs"] == [1.0, 1.0, 1.0, 1.0]

    def test_malformed_point_exits_2(self, capsys):
        code, out, err = run(capsys, "eig", "orthant:3", "1,2,zebra")
        assert code == 2 and not out and "error" in err

    def test_dimension_mismatch_exits_3(self, capsys):
        code, _, err = run(capsys, "eig", "orthant:3", "1,2")
        assert code == 3 and "coordinates" in err

    def test_unknown_cone_exits_2(self, capsys):
        code, _, _ = run(capsys, "eig", "mystery:3", "1,2,3")
        assert code == 2

    def test_rational_tokens(self, capsys):
        code, data, _ = run_json(capsys, "eig", "orthant:2", "3/2,0.25")
        assert code == 0
        assert data["eigs"] == [1.5, 0.25]


class TestMember:
    def test_relaxation_membership_in(self, capsys):
        code, data, _ = run_json(capsys, "member", "orthant:4:k=1", "--", "-1,3,3,3")
        assert code == 0 and data["verdict"] == "In"

    def test_relaxation_membership_out(self, capsys):
        code, data, _ = run_json(capsys, "member", "orthant:4:k=1", "--", "-5,1,1,1")
        assert code == 1 and data["verdict"] == "Out"

    def test_psd_negative_identity_out(self, capsys):
        code, data, _ = run_json(
            capsys, "member", "psd:3", "--", "-1,-1,-1,0,0,0"
        )
        assert code == 1 and data["verdict"] == "Out"

    def test_interior_point_in(self, capsys):
        code, data, _ = run_json(capsys, "member", "soc:3", "2,1,0")
        assert code == 0 and data["verdict"] == "In"


class TestDeriv:
    def test_prints_polynomial_json(self, capsys):
        code, data, _ = run_json(capsys, "deriv", "orthant:4", "--k", "1")
        assert code == 0
        assert data["degree"] == 3 and len(data["terms"]) == 4

    def test_out_of_range_exits_2(self, capsys):
        code, _, _ = run(capsys, "deriv", "orthant:3", "--k", "7")
        assert code == 2


class TestAutcheck:
    def test_permutation_holds(self, capsys, tmp_path):
        path = tmp_path / "perm.json"
        path.write_text(json.dumps(
            [["0", "1", "0"], ["0", "0", "1"], ["1", "0", "0"]]
        ))
        code, data, _ = run_json(capsys, "autcheck", "orthant:3", str(path))
        assert code == 0 and data["verdict"] == "Holds"
        assert data["kappa"] == {"num": "1", "den": "1"}

    def test_unequal_diagonal_fails_on_relaxation(self, capsys, tmp_path):
        path = tmp_path / "diag.json"
        path.write_text(json.dumps(
            [["1", "0", "0", "0", "0"],
             ["0", "2", "0", "0", "0"],
             ["0", "0", "1", "0", "0"],
             ["0", "0", "0", "1", "0"],
             ["0", "0", "0", "0", "1"]]
        ))
        code, data, _ = run_json(capsys, "autcheck", "orthant:5", str(path), "--k", "1")
        assert code == 1 and data["verdict"] == "FailsWithWitness"

    def test_rational_signed_permutation_on_psd_relaxation(self, capsys, tmp_path):
        from hypercones import autgroup
        from hypercones.autgroup import LinearMap

        q = LinearMap([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
        lq = autgroup.lm_linear_map(q, 4)
        path = tmp_path / "lq.json"
        path.write_text(json.dumps(lq.to_json_rows()))
        code, data, _ = run_json(capsys, "autcheck", "psd:4", str(path), "--k", "1")
        assert code == 0 and data["verdict"] == "Holds"

    def test_matrix_dimension_mismatch_exits_3(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps([["1", "0"], ["0", "1"]]))
        code, _, _ = run(capsys, "autcheck", "orthant:3", str(path))
        assert code == 3

    def test_missing_file_exits_2(self, capsys):
        code, _, _ = run(capsys, "autcheck", "orthant:3", "/nonexistent.json")
        assert code == 2


class TestChainAndRog:
    def test_chain_orthant(self, capsys):
        code, data, _ = run_json(capsys, "chain", "orthant:5")
        assert code == 0
        assert data["ranks"] == [0, 1, 2, 3, 4, 5]

    def test_chain_psd(self, capsys):
        code, data, _ = run_json(capsys, "chain", "psd:3")
        assert code == 0
        assert data["ranks"] == [0, 1, 2, 3]

    def test_rogcheck_split(self, capsys):
        code, data, _ = run_json(capsys, "rogcheck", "psd:3")
        assert code == 0 and data["verdict"] == "Holds"
        code, data, _ = run_json(capsys, "rogcheck", "l1")
        assert code == 1 and data["verdict"] == "FailsWithWitness"


class TestDescriptorFileCones:
    def test_member_on_user_supplied_cone(self, capsys, tmp_path):
        from hypercones import gallery

        path = tmp_path / "cone.json"
        path.write_text(json.dumps(gallery.soc(3).descriptor_json()))
        code, data, _ = run_json(capsys, "member", f"file:{path}", "2,1,0")
        assert code == 0 and data["verdict"] == "In"
        code, data, _ = run_json(capsys, "member", f"file:{path}", "0,1,0")
        assert code == 1 and data["verdict"] == "Out"


class TestGarding:
    def test_soc_sampled(self, capsys):
        code, data, _ = run_json(capsys, "garding", "soc:3", "--samples", "25")
        assert code == 0
        assert data["min_gap_random"] >= -1e-9
        assert data["max_gap_proportional"] <= 1e-9


class TestSuite:
    def test_filtered_run_and_determinism(self, capsys):
        code1, data1, _ = run_json(
            capsys, "suite", "--filter", "l1-derivatives", "--seed", "3", "--json"
        )
        code2, data2, _ = run_json(
            capsys, "suite", "--filter", "l1-derivatives", "--seed", "3", "--json"
        )
        assert code1 == code2 == 0
        assert data1 == data2
        assert data1["counts"]["pass"] == 1

    def test_bad_filter_exits_2(self, capsys):
        code, _, err = run(capsys, "suite", "--filter", "zzz")
        assert code == 2 and "matches no checks" in err

    def test_progress_goes_to_stderr_json_to_stdout(self, capsys):
        code, out, err = run(
            capsys, "suite", "--filter", "orthant-derivative", "--json"
        )
        assert code == 0
        json.loads(out)  # stdout is pure JSON
        assert "orthant-derivative-identity: pass" in err


class TestSeedEnv:
    def test_env_seed_used_as_default(self, capsys, monkeypatch):
        monkeypatch.setenv("HYPERCONE_SEED", "7")
        parser = cli.build_parser()
        args = parser.parse_args(["suite"])
        assert args.seed == 7

    def test_bad_env_seed_falls_back(self, monkeypatch):
        monkeypatch.setenv("HYPERCONE_SEED", "pickles")
        assert cli._default_seed() == 0
