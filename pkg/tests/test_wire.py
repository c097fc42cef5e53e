import itertools
import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naive import commute, stabilizers_of
from stabwire.oracle import contract_cylinder
from stabwire.symplectic import omega, pauli_from_str, pauli_to_str, rank_rows, single
from stabwire.tensor import GL2, GaugeElement, cluster_tensor, ghz_tensor, product_tensor
from stabwire.wire import (
    OmegaMatrix,
    PHI_SIGNATURES,
    apply_T,
    capacities,
    capacities_by_chains,
    capacity,
    chain_fronts,
    cylinder_group,
    direct_capacity,
    local_form,
    omega1,
    omega_pairwise_form,
    omega_standard_form,
    phi1,
    phi_class,
    ring_group,
    update_rule,
)


def span(rows):
    out = {0}
    for r in rows:
        out |= {r ^ s for s in out}
    return out


def any_tensor():
    return st.integers(0, 75734)


# ---------------------------------------------------------------- layers


def test_ghz_ring_has_one_pair():
    assert ring_group(ghz_tensor(), 2).canonical_form().p == 1


def test_cluster_ring_is_fully_entangled(fixtures):
    assert ring_group(fixtures["cluster"], 3).canonical_form().p == 3


@pytest.mark.parametrize("seed", range(10))
def test_single_site_ring_has_two_qubits(tensors, seed):
    t = random.Random(seed).choice(tensors)
    g = ring_group(t, 1)
    assert g.group.n == 2 and g.group.rank <= 2


def test_ring_rejects_zero_circumference():
    with pytest.raises(ValueError):
        ring_group(ghz_tensor(), 0)


@pytest.mark.parametrize("seed", range(25))
def test_ring_layers_are_full_rank_and_translation_covariant(tensors, seed):
    rng = random.Random(seed)
    t, n = rng.choice(tensors), rng.randint(1, 6)
    g = ring_group(t, n).group
    assert g.rank == 2 * n
    m = 2 * n

    def shift(v):
        # rotate the left and right edges by one site each
        s = pauli_to_str(v, m)
        left, right = s[:n], s[n:]
        return pauli_from_str(left[-1] + left[:-1] + right[-1] + right[:-1])

    assert span(shift(v) for v in g.gens) == span(g.gens)


def test_cylinder_depth_one_is_the_ring(tensors):
    for t in tensors[::7919]:
        for n in (1, 2, 3):
            assert span(cylinder_group(t, n, 1).group.gens) == span(ring_group(t, n).group.gens)


def test_cylinder_examples(fixtures):
    assert cylinder_group(fixtures["ghz"], 4, 3).canonical_form().p == 1
    assert cylinder_group(fixtures["toric"], 3, 4).canonical_form().p == 2


@pytest.mark.parametrize("seed", range(15))
def test_grid_and_layer_contractions_agree(tensors, seed):
    rng = random.Random(seed)
    t, n, d = rng.choice(tensors), rng.randint(1, 3), rng.randint(1, 3)
    a = cylinder_group(t, n, d, "grid").group.gens
    b = cylinder_group(t, n, d, "layers").group.gens
    assert span(a) == span(b)


# ---------------------------------------------------------------- phi1 / T


def test_phi1_examples(fixtures, phi_reps):
    phi = phi1(fixtures["cluster"], 4)
    assert phi.p == 4 and phi.a == () and phi.b == ()
    for n in range(1, 7):
        assert phi1(fixtures["ghz"], n).p == 1
    assert phi1(phi_reps["e"], 6).p == 4


def test_cluster_update_rule_is_the_cluster_qca():
    n = 5
    rule = update_rule(cluster_tensor(), n)
    for i in range(n):
        want = single("X", (i - 1) % n, n) ^ single("Z", i, n) ^ single("X", (i + 1) % n, n)
        assert apply_T(rule, single("Z", i, n)) == single("X", i, n)
        assert apply_T(rule, single("X", i, n)) == want


def test_cluster_fixture_realizes_the_rule_up_to_relabel(fixtures):
    n = 5
    rule = update_rule(fixtures["cluster"], n)
    z = [single("Z", i, n) for i in range(n)]
    x = [single("X", i, n) for i in range(n)]

    def relabel(v, s):
        from stabwire.tensor import _apply_letter_maps

        return _apply_letter_maps(v, n, [s] * n)

    hits = 0
    for s_in, s_out in itertools.product(GL2, GL2):
        ok = all(rule(relabel(z[i], s_in)) == relabel(x[i], s_out) for i in range(n))
        ok = ok and all(
            rule(relabel(x[i], s_in)) == relabel(x[i - 1] ^ z[i] ^ x[(i + 1) % n], s_out) for i in range(n)
        )
        hits += ok
    assert hits >= 1


def test_T_of_identity_and_outside_domain(fixtures):
    rule = update_rule(fixtures["ghz"], 3)
    assert apply_T(rule, 0) == 0
    a1 = rule.a[0]
    outside = next(v for v in range(1, 1 << 6) if omega(v, a1, 3))
    assert apply_T(rule, outside) is None


@settings(max_examples=60, deadline=None)
@given(any_tensor(), st.integers(1, 6), st.integers(0, 2**40), st.integers(0, 2**40))
def test_T_is_linear_and_preserves_commutation(tensors, i, n, c1, c2):
    rule = update_rule(tensors[i], n)
    dom = rule.domain
    if not dom:
        return
    x = y = 0
    for k, v in enumerate(dom):
        x ^= v if (c1 >> k) & 1 else 0
        y ^= v if (c2 >> k) & 1 else 0
    tx, ty, txy = rule(x), rule(y), rule(x ^ y)
    assert None not in (tx, ty, txy)
    assert txy == tx ^ ty
    assert omega(tx, ty, n) == omega(x, y, n)


# ---------------------------------------------------------------- capacity


def test_capacity_examples(fixtures):
    assert capacity(fixtures["cluster"], 5, 5) == 5
    assert capacity(fixtures["ghz"], 6, 6) == 1
    assert capacity(fixtures["toric"], 4, 6) == 3


def test_capacity_rejects_bad_sizes():
    with pytest.raises(ValueError):
        capacity(ghz_tensor(), 0, 1)
    with pytest.raises(ValueError):
        capacity(ghz_tensor(), 1, 0)


@settings(max_examples=60, deadline=None)
@given(any_tensor(), st.integers(1, 6))
def test_depth_one_capacity_is_pair_count(tensors, i, n):
    assert capacity(tensors[i], n, 1) == phi1(tensors[i], n).p


@settings(max_examples=60, deadline=None)
@given(any_tensor(), st.integers(1, 4), st.integers(1, 4))
def test_algorithm_matches_direct_contraction(tensors, i, n, d):
    assert capacity(tensors[i], n, d) == direct_capacity(tensors[i], n, d)


@settings(max_examples=60, deadline=None)
@given(any_tensor(), st.integers(1, 6))
def test_monotone_and_plateau(tensors, i, n):
    caps = capacities(tensors[i], n, 12, stop_on_plateau=False)
    assert all(a >= b for a, b in zip(caps, caps[1:]))
    first = next(d for d in range(11) if caps[d] == caps[d + 1])
    assert all(c == caps[first] for c in caps[first:])
    assert first + 1 <= caps[0] + 1
    assert caps == capacities(tensors[i], n, 12)


def test_trace_fronts_grow_until_plateau(fixtures):
    fronts = chain_fronts(fixtures["toric"], 4, 6)
    ranks = [rank_rows(f) for f in fronts]
    assert ranks == sorted(ranks)
    assert 4 - ranks[-1] == 3


def test_per_generator_chains_can_miss_products(reps):
    """The chain-by-chain reading disagrees with direct contraction
    somewhere; the subspace version never does."""
    witness = None
    for t in reps:
        for n in (2, 3, 4):
            caps = capacities(t, n, 4)
            if capacities_by_chains(t, n, 4) != caps:
                witness = (t, n, caps)
                break
        if witness:
            break
    assert witness is not None
    t, n, caps = witness
    assert caps == [direct_capacity(t, n, d) for d in range(1, 5)]


# ---------------------------------------------------------------- Omega


def test_qca_class_omega_is_empty(fixtures):
    om = omega1(fixtures["cluster"], 4)
    assert (om.m, om.cols) == (0, 8) and om.rows == ()


def test_product_class_omega_has_no_pair_blocks(phi_reps):
    om = omega1(phi_reps["a"], 4)
    assert om.p == 0 and om.cols == om.m == 4


def test_ghz_omega_against_dense_state():
    """The dense ring state fixes Z_L and S_R without any choice of
    generators; every Z_L element must commute with every S_R element."""
    n = 3
    edge = contract_cylinder(ghz_tensor().to_strings(), n, 1)
    stabs = stabilizers_of(edge.amplitudes)
    zl = {s[:n] for s in stabs if s[n:] == "I" * n}
    sr = {s[n:] for s in stabs}
    assert len(zl) == 4 and len(sr) == 16
    assert all(commute(a, b) for a in zl for b in sr)
    om = omega1(ghz_tensor(), n)
    assert (om.m, om.cols) == (2, 4)
    assert om.rows == (0, 0)
    assert omega_standard_form(om).serialize() == "3,1,00,0000"


def test_standard_form_of_zero_and_identity():
    zero = OmegaMatrix(4, 1, (0, 0, 0))
    assert omega_standard_form(zero).rows == zero.rows
    eye = OmegaMatrix(5, 2, (0b0100001, 0b1000010, 0b0000100))
    sf = omega_standard_form(eye)
    assert sf.left_block() == [1, 2, 4]


def random_move(om: OmegaMatrix, rng: random.Random) -> OmegaMatrix:
    """One legal change of canonical generators, as its effect on Omega."""
    m, p = om.m, om.p
    rows = list(om.rows)
    cols = [[(r >> j) & 1 for r in rows] for j in range(om.cols)]
    kind = rng.randrange(4)
    if kind == 0 and m > 1:  # a_i += a_j
        i, j = rng.sample(range(m), 2)
        rows[i] ^= rows[j]
        return OmegaMatrix(om.n, p, tuple(rows))
    if kind == 1 and m > 1:  # b_j += b_k
        j, k = rng.sample(range(m), 2)
        cols[j] = [a ^ b for a, b in zip(cols[j], cols[k])]
    elif kind == 2 and m and p:  # a pair's right half picks up some b_j
        j, c = rng.randrange(m), m + rng.randrange(2 * p)
        cols[c] = [a ^ b for a, b in zip(cols[c], cols[j])]
    elif kind == 3 and p:  # symplectic transvection of the pair basis
        h = rng.randrange(1, 1 << (2 * p))
        hsum = [0] * m
        for c in range(2 * p):
            if (h >> c) & 1:
                hsum = [a ^ b for a, b in zip(hsum, cols[m + c])]
        new = []
        for c in range(2 * p):
            partner = c ^ 1
            coef = (h >> partner) & 1
            new.append([a ^ (b & coef) for a, b in zip(cols[m + c], hsum)])
        cols[m:] = new
    out = [0] * m
    for j, col in enumerate(cols):
        for i, bit in enumerate(col):
            out[i] |= bit << j
    return OmegaMatrix(om.n, p, tuple(out))


def omegas():
    return st.tuples(st.integers(0, 4), st.integers(0, 3)).flatmap(
        lambda mp: st.lists(st.integers(0, (1 << (mp[0] + 2 * mp[1])) - 1), min_size=mp[0], max_size=mp[0]).map(
            lambda rows: OmegaMatrix(mp[0] + mp[1], mp[1], tuple(rows))
        )
    )


@settings(max_examples=150)
@given(omegas(), st.integers(0, 2**32))
def test_standard_form_invariant_under_100_moves(om, seed):
    rng = random.Random(seed)
    sf = omega_standard_form(om)
    assert omega_standard_form(sf).rows == sf.rows
    moved = om
    for _ in range(100):
        moved = random_move(moved, rng)
    assert omega_standard_form(moved).rows == sf.rows


@pytest.mark.parametrize("m,p", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)])
def test_standard_form_separates_orbits_exactly(m, p):
    """Breadth-first orbits of every matrix of this shape under all moves:
    the standard form is constant on each orbit and differs between them."""
    width = m + 2 * p
    every = list(itertools.product(range(1 << width), repeat=m))
    seen = {}
    orbit_forms = []
    rng = random.Random(0)
    for start in every:
        if start in seen:
            continue
        k = len(orbit_forms)
        seen[start] = k
        queue = deque([start])
        while queue:
            cur = OmegaMatrix(m + p, p, queue.popleft())
            for _ in range(24):
                nxt = random_move(cur, rng).rows
                if nxt not in seen:
                    seen[nxt] = k
                    queue.append(nxt)
        orbit_forms.append(omega_standard_form(OmegaMatrix(m + p, p, start)).rows)
    for rows, k in seen.items():
        assert omega_standard_form(OmegaMatrix(m + p, p, rows)).rows == orbit_forms[k]
    assert len(set(orbit_forms)) == len(orbit_forms)


def test_pairwise_form_is_idempotent(tensors):
    for t in tensors[::4999]:
        for n in range(1, 6):
            f = omega_pairwise_form(omega1(t, n))
            assert omega_pairwise_form(f).rows == f.rows


# ---------------------------------------------------------------- local form and Phi class


def test_local_forms_of_named_tensors():
    assert local_form(product_tensor()).case == "i"
    assert local_form(ghz_tensor()).case == "ii"
    # the cluster tensor realizes the cluster QCA yet has p = 1, q = 1 with
    # unequal gammas: case iii, not the two-pair case
    lf = local_form(cluster_tensor())
    assert (lf.case, lf.p, lf.q, lf.gamma_equal) == ("iii", 1, 1, False)


def test_local_form_keeps_sub_data_for_merged_cases(reps):
    cases = {(lf.case, lf.p, lf.q) for lf in map(local_form, reps)}
    assert ("i", 0, None) in cases and ("i", 1, 0) in cases
    assert {c for c, _, _ in cases} == {"i", "ii", "iii", "iv"}


def test_ghz_local_form_predicts_class_b(fixtures):
    assert local_form(fixtures["ghz"]).case == local_form(ghz_tensor()).case == "ii"
    assert phi_class(fixtures["ghz"]).letter == "b"


def test_phi_classes_of_fixtures(fixtures):
    assert phi_class(fixtures["ghz"]).letter == "b"
    assert phi_class(fixtures["cluster"]).letter == "g"
    assert phi_class(fixtures["toric"]).letter == "c"


def test_phi_signatures_are_distinct_on_one_to_six():
    sigs = {tuple(f(n) for n in range(1, 7)) for f in PHI_SIGNATURES.values()}
    assert len(sigs) == 7


@settings(max_examples=30, deadline=None)
@given(any_tensor(), st.sampled_from(GL2), st.sampled_from(GL2))
def test_gauge_invariance_of_labels(tensors, i, sv, sh):
    t = tensors[i]
    moved = GaugeElement.linked(sv, sh).apply(t)
    assert phi_class(moved).letter == phi_class(t).letter
    assert local_form(moved).case == local_form(t).case
    for n in range(1, 5):
        assert omega_standard_form(omega1(moved, n)).rows == omega_standard_form(omega1(t, n)).rows
        assert capacities(moved, n, 4) == capacities(t, n, 4)
