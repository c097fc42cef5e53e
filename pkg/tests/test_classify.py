import random

import pytest

from stabwire import classify as cl
from stabwire.classify import ClassSignature, TensorRecord
from stabwire.symplectic import rank_rows
from stabwire.tensor import cluster_tensor, ghz_tensor
from stabwire.wire import capacities, capacity, phi1


def grid(f):
    return tuple(tuple(f(n, d) for d in range(1, 7)) for n in range(1, 7))


# ---------------------------------------------------------------- signatures


def test_signature_bounds_enforced():
    with pytest.raises(ValueError):
        ClassSignature(grid(lambda n, d: n + 1))
    with pytest.raises(ValueError):
        ClassSignature(grid(lambda n, d: min(n, d)))  # grows with depth


def test_numbering_anchors():
    zero = ClassSignature(grid(lambda n, d: 0))
    full = ClassSignature(grid(lambda n, d: n))
    one = ClassSignature(grid(lambda n, d: 1))
    low = ClassSignature(grid(lambda n, d: 1 if d == 1 else 0))
    ids = cl.number_classes([one, full, zero, low, one])
    assert ids == {zero: 0, full: 12, low: 1, one: 2}


def test_signature_of_named_tensors():
    assert cl.signature(ghz_tensor()) == ClassSignature(grid(lambda n, d: 1))
    assert cl.signature(cluster_tensor()).is_full()


# ---------------------------------------------------------------- report


def test_thirteen_classes_and_census(report):
    census = report.census()
    assert len(census) == 13
    assert sum(census.values()) == 2649
    assert sorted(census) == list(range(13))
    assert len({r.canonical_ordinal for r in report.records}) == 2649


def test_census_is_stable(report):
    assert report.census() == {0: 888, 1: 50, 2: 42, 3: 66, 4: 264, 5: 50, 6: 50, 7: 170, 8: 66, 9: 50, 10: 50, 11: 38, 12: 865}


def test_named_class_signatures(report, fixtures, rep_ordinals, reps):
    cls = {o: r.transmission_class for o, r in zip(rep_ordinals, report.records)}
    where = {t: cls[o] for o, t in zip(rep_ordinals, reps)}
    assert report.class_signatures[where[fixtures["ghz"]]] == ClassSignature(grid(lambda n, d: 1))
    assert where[fixtures["cluster"]] == cl.QCA
    assert report.class_signatures[cl.QCA].is_full()
    assert report.class_signatures[cl.TRIVIAL].is_zero()


def test_each_class_has_one_phi_letter(report):
    letters = {}
    for r in report.records:
        letters.setdefault(r.transmission_class, set()).add(r.phi_class)
    assert all(len(v) == 1 for v in letters.values())


def test_phi_crosstab_examples(report):
    cross = cl.phi_transmission_crosstab(report)
    assert cross["g"] == {cl.QCA}
    assert cross["a"] == {cl.TRIVIAL}
    assert len(cross["c"]) == 3


def test_phi_crosstab_matches_exactly(report):
    exact, msg = cl.check_phi_crosstab(report)
    assert exact, msg


def test_phi_crosstab_shape_mismatch_raises(report):
    bad = cl.ClassificationReport(
        [TensorRecord(r.canonical_ordinal, r.signature, r.transmission_class, "a", r.omega_class) for r in report.records],
        report.class_signatures,
        report.omega_vectors,
    )
    with pytest.raises(ValueError):
        cl.check_phi_crosstab(bad)


def test_omega_is_class_unique_outside_trivial(report):
    oc = cl.omega_census(report)
    assert oc.unique_elsewhere
    assert oc.trivial == 7


def test_sweep_rejects_wrong_class_count(reps, rep_ordinals):
    with pytest.raises(ValueError, match="capacity signatures"):
        cl.sweep(reps[:40], rep_ordinals[:40])


def test_report_round_trip(report):
    text = cl.format_report(report)
    assert text.splitlines()[0] == cl.REPORT_HEADER
    header = text.splitlines()[1].split(",")
    assert header[:4] == ["canonical_ordinal", "transmission_class", "phi_class", "omega_class"]
    assert header[4] == "sig_c11" and header[-1] == "sig_c66" and len(header) == 40
    back = cl.parse_report(text)
    assert back.records == report.records
    assert cl.format_report(back) == text


def test_census_file(report):
    lines = cl.format_census(report).splitlines()
    assert lines[:2] == [cl.REPORT_HEADER, "class_id,count"]
    assert sum(int(x.split(",")[1]) for x in lines[2:]) == 2649


def test_parse_rejects_foreign_files():
    with pytest.raises(ValueError):
        cl.parse_report("a,b\n1,2\n")


# ---------------------------------------------------------------- local families


def test_every_representative_has_a_left_family(reps):
    for t in reps[::37]:
        assert cl.left_family(t) is not None


def test_family_letters_agree_with_phi_class(reps, report, rep_ordinals):
    letter = {o: r.phi_class for o, r in zip(rep_ordinals, report.records)}
    for o, t in list(zip(rep_ordinals, reps))[::61]:
        assert cl.LEFT_FAMILIES[cl.left_family(t)][0] == letter[o]


def test_zl_table(reps):
    verdicts = cl.zl_table_check(reps)
    assert len(verdicts) == 9
    for v in verdicts:
        assert v.passed, (v.family, v.detail)


def _first_of_family(reps, name):
    return next(t for t in reps if cl.left_family(t) == name)


def test_zl_examples(reps):
    t = _first_of_family(reps, "Z,XX")
    assert all(len(phi1(t, n).a) == 1 for n in (4, 5, 6))
    t = _first_of_family(reps, "Z,X")
    assert all(phi1(t, n).a == () for n in (4, 5, 6))
    t = _first_of_family(reps, "Z,XXX")
    assert len(phi1(t, 6).a) == 2 and phi1(t, 5).a == ()


def test_relabel_check_is_not_trivially_true():
    n = 4
    z = cl.LEFT_FAMILIES["Z,X"][1](n)
    zz = cl.LEFT_FAMILIES["Z,XX"][1](n)
    assert rank_rows(zz) == 2 * n - 1
    assert not cl.same_up_to_relabel(zz, z, n)
    assert cl.same_up_to_relabel(z, z, n)


@pytest.mark.parametrize("letter", list("abcdefg"))
def test_left_rank_formulas(phi_reps, letter):
    assert cl.left_rank_check(phi_reps[letter], letter) == []


# ---------------------------------------------------------------- extended grid


def test_extended_grid_examples(report, by_ordinal):
    qca = report.members(cl.QCA)[:2]
    for o in qca:
        assert capacity(by_ordinal[o], 9, 9) == 9
    ghz_cls = next(c for c, s in report.class_signatures.items() if s == ClassSignature(grid(lambda n, d: 1)))
    for o in report.members(ghz_cls)[:2]:
        assert capacity(by_ordinal[o], 7, 8) == 1


def test_extended_grid_small(report, by_ordinal):
    v = cl.proposition1_check(report, by_ordinal, n_ext=7, d_ext=7, pairs=10, seed=3)
    assert v.passed, v.line()
    assert v.checked == 2 * 13 + 10


def test_extended_grid_reports_witness(report, by_ordinal):
    # pretend a trivial-class tensor sits in the QCA class
    records = list(report.records)
    zero = next(i for i, r in enumerate(records) if r.transmission_class == cl.TRIVIAL)
    r = records[zero]
    records[zero] = TensorRecord(r.canonical_ordinal, r.signature, cl.QCA, r.phi_class, r.omega_class)
    # keep the impostor at the end of the class so the last-member pair sees it
    records.append(records.pop(zero))
    fake = cl.ClassificationReport(records, report.class_signatures, report.omega_vectors)
    v = cl.proposition1_check(fake, by_ordinal, n_ext=3, d_ext=3, pairs=0)
    assert not v.passed
    assert "differ at" in v.failures[0]


# ---------------------------------------------------------------- lemma helpers


def test_critical_depth():
    assert cl.critical_depth([3, 2, 2, 2]) == 2
    assert cl.critical_depth([1, 1]) == 1
    assert cl.critical_depth([3, 2, 1]) is None


def test_lemma_checks_on_fixtures(fixtures):
    rng = random.Random(0)
    for t in fixtures.values():
        for n in range(1, 5):
            out = cl.lemma_checks(t, n, rng)
            assert all(w is None for w in out.values()), out


def test_lemma_suites_small(reps):
    verdicts = cl.lemma_suites(reps[:30], probes=20, seed=1, n_max=4)
    assert [v.name for v in verdicts] == ["monotone", "plateau", "critical depth", "T preserves commutation", "algorithm vs direct"]
    assert all(v.passed for v in verdicts)
    assert verdicts[0].checked == 30 * 4 + 20


def test_verdict_line():
    v = cl.Verdict("demo", checked=3)
    assert v.line() == "PASS demo (3 checks)"
    v.fail("x")
    assert v.line().startswith("FAIL demo (3 checks) first counterexample: x")


def test_oracle_suite_negative_control(fixtures):
    cases = [(fixtures["ghz"], 2, 2)]
    assert cl.oracle_suite(cases).passed
    bad = cl.oracle_suite(cases, corrupt=True)
    assert not bad.passed and "dense" in bad.failures[0]


# ---------------------------------------------------------------- cache


def test_capacity_cache_round_trip(tmp_path, fixtures):
    path = tmp_path / "caps.csv"
    c = cl.CapacityCache(path)
    t = fixtures["toric"]
    assert c.capacities(5, t, 4, 3) == capacities(t, 4, 3)
    c.save()
    again = cl.CapacityCache(path)
    assert again.values == c.values
    assert path.read_text().splitlines()[0] == cl.CapacityCache.HEADER
    # served from disk: a different tensor under the same key is ignored
    assert again.capacities(5, ghz_tensor(), 4, 3) == [3, 3, 3]
