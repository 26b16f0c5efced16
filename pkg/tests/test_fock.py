import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhchaos.fock import (
    CapacityError, InvalidStateError, SectorSpec, UnsupportedSectorError, basis_dimension, build_sector_basis,
    enumerate_basis, rank_states, reflect, state_index, translate,
)


def compositions(N, L):
    """All occupation vectors, brute force."""
    return [c for c in itertools.product(range(N + 1), repeat=L) if sum(c) == N]


def character_dimension(N, L, bc, parity):
    """Sector dimension as (1/|G|) sum_g chi(g) * #fixed states of g (real one-dimensional irreps)."""
    states = compositions(N, L)
    if bc == "hwbc":
        group = [(lambda s: s, 1), (lambda s: s[::-1], parity)]
    else:
        group = []
        for a in range(L):
            group.append((lambda s, a=a: s[-a:] + s[:-a] if a else s, 1))
            group.append((lambda s, a=a: (s[-a:] + s[:-a] if a else s)[::-1], parity))
    total = sum(chi * sum(1 for s in states if g(s) == s) for g, chi in group)
    assert total % len(group) == 0
    return total // len(group)


def necklace_count(N, L):
    """Translation orbits of N bosons on a ring of L sites (Q=0 dimension)."""
    total = sum(
        math.comb(N // d + L // d - 1, N // d) * sum(1 for j in range(1, d + 1) if math.gcd(j, d) == 1)
        for d in range(1, L + 1)
        if N % d == 0 and L % d == 0
    )
    return total // L


class TestEnumeration:
    @pytest.mark.parametrize("N,L,expected", [(5, 5, 126), (1, 4, 4), (1, 9, 9), (0, 3, 1), (3, 1, 1)])
    def test_dimension(self, N, L, expected):
        assert len(enumerate_basis(N, L)) == expected == basis_dimension(N, L)

    def test_large_count_matches_binomial(self):
        states = enumerate_basis(12, 12)
        assert states.shape == (math.comb(23, 12), 12) == (1_352_078, 12)

    @pytest.mark.parametrize("N,L", [(3, 3), (4, 2), (2, 5), (5, 4)])
    def test_reverse_lexicographic_order(self, N, L):
        expected = sorted(compositions(N, L), reverse=True)
        assert [tuple(r) for r in enumerate_basis(N, L).tolist()] == expected

    def test_occupations_sum_to_n(self):
        states = enumerate_basis(6, 5)
        assert np.all(states.sum(axis=1) == 6)
        assert len({tuple(r) for r in states.tolist()}) == len(states)

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            enumerate_basis(12, 12, max_dim=1000)


class TestStateIndex:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_round_trip(self, n):
        states = enumerate_basis(n, n)
        assert [state_index(s, n, n) for s in states] == list(range(len(states)))
        assert np.array_equal(rank_states(states, n), np.arange(len(states)))

    def test_first_and_last(self):
        assert state_index([4, 0, 0], 4, 3) == 0
        assert state_index([0, 0, 4], 4, 3) == math.comb(6, 4) - 1

    @pytest.mark.parametrize("bad", [[1, 1, 1], [2, 0], [3, -1, 0]])
    def test_invalid_state(self, bad):
        with pytest.raises(InvalidStateError):
            state_index(bad, 2, 3)


@pytest.mark.property
class TestGroupActions:
    def test_reflect_examples(self):
        assert reflect([2, 0, 1]).tolist() == [1, 0, 2]
        assert reflect([1, 3, 1]).tolist() == [1, 3, 1]

    def test_translate_example(self):
        assert translate([2, 0, 1], 1).tolist() == [1, 2, 0]

    @given(st.lists(st.integers(0, 6), min_size=1, max_size=9))
    def test_reflection_is_involution(self, occ):
        assert reflect(reflect(occ)).tolist() == occ

    @given(st.lists(st.integers(0, 6), min_size=1, max_size=9), st.integers(-20, 20), st.integers(-20, 20))
    def test_translation_group_law(self, occ, a, b):
        L = len(occ)
        assert translate(translate(occ, a), b).tolist() == translate(occ, (a + b) % L).tolist()
        assert translate(occ, L).tolist() == occ

    @given(st.lists(st.integers(0, 6), min_size=1, max_size=9), st.integers(0, 20))
    def test_reflection_inverts_translation(self, occ, a):
        # R T_a R = T_{-a}
        assert reflect(translate(reflect(occ), a)).tolist() == translate(occ, -a).tolist()


class TestSectorSpec:
    def test_q_only_for_pbc(self):
        with pytest.raises(ValueError):
            SectorSpec("hwbc", 3, 3, Q=0, parity=1)

    def test_parity_needs_q_for_pbc(self):
        with pytest.raises(ValueError):
            SectorSpec("pbc", 3, 3, parity=1)

    def test_parity_only_at_invariant_momenta(self):
        with pytest.raises(ValueError):
            SectorSpec("pbc", 4, 4, Q=1, parity=1)

    @pytest.mark.parametrize("Q", [1, 2])
    def test_nonzero_momentum_unsupported(self, Q):
        with pytest.raises(UnsupportedSectorError):
            SectorSpec("pbc", 4, 4, Q=Q)

    def test_bad_parity(self):
        with pytest.raises(ValueError):
            SectorSpec("hwbc", 3, 3, parity=2)


class TestSectorDimensions:
    @pytest.mark.parametrize("spec,dim", [
        (SectorSpec("pbc", 12, 12, Q=0, parity=-1), 55_898),
        (SectorSpec("pbc", 12, 12, Q=0, parity=1), 56_822),
        (SectorSpec("hwbc", 10, 10, parity=-1), 46_126),
        (SectorSpec("hwbc", 7, 7, parity=-1), 848),
        (SectorSpec("hwbc", 9, 9, parity=-1), 12_120),
        (SectorSpec("hwbc", 11, 11, parity=-1), 176_232),
    ])
    def test_published_dimensions(self, spec, dim):
        assert build_sector_basis(spec).dim == dim

    @pytest.mark.parametrize("bc", ["hwbc", "pbc"])
    @pytest.mark.parametrize("parity", [1, -1])
    @pytest.mark.parametrize("N,L", [(n, l) for n in range(1, 6) for l in range(1, 6)])
    def test_character_formula(self, bc, parity, N, L):
        q = 0 if bc == "pbc" else None
        assert build_sector_basis(SectorSpec(bc, N, L, Q=q, parity=parity)).dim == character_dimension(N, L, bc, parity)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_hwbc_parity_sectors_cover_full_space(self, n):
        dims = [build_sector_basis(SectorSpec("hwbc", n, n, parity=p)).dim for p in (1, -1)]
        assert sum(dims) == math.comb(2 * n - 1, n)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_pbc_zero_momentum_is_necklace_count(self, n):
        # Q=0 parity blocks sum to the number of translation orbits; Q != 0 fills the remainder
        dims = [build_sector_basis(SectorSpec("pbc", n, n, Q=0, parity=p)).dim for p in (1, -1)]
        assert sum(dims) == build_sector_basis(SectorSpec("pbc", n, n, Q=0)).dim == necklace_count(n, n)
        assert sum(dims) <= math.comb(2 * n - 1, n)

    @pytest.mark.parametrize("basis", ["interaction", "tunneling"])
    def test_full_space(self, basis):
        b = build_sector_basis(SectorSpec("hwbc", 5, 5, basis=basis))
        assert b.dim == 126
        assert np.all(b.norms == 1)

    @pytest.mark.parametrize("bc,q", [("hwbc", None), ("pbc", 0)])
    @pytest.mark.parametrize("parity", [1, -1])
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_tunneling_sectors_have_same_dimension(self, bc, q, parity, n):
        dims = [build_sector_basis(SectorSpec(bc, n, n, Q=q, parity=parity, basis=b)).dim
                for b in ("interaction", "tunneling")]
        assert dims[0] == dims[1]


class TestSectorBasis:
    @pytest.mark.parametrize("spec", [
        SectorSpec(bc, n, n, Q=(0 if bc == "pbc" else None), parity=p, basis=basis)
        for bc in ("hwbc", "pbc") for n in (2, 3, 4, 5) for p in (1, -1) for basis in ("interaction", "tunneling")
    ], ids=lambda s: s.label())
    def test_projector_is_isometry(self, spec):
        P = build_sector_basis(spec).projector().toarray()
        assert np.allclose(P.T @ P, np.eye(P.shape[1]), atol=1e-12, rtol=0)

    @pytest.mark.parametrize("bc,q", [("hwbc", None), ("pbc", 0)])
    def test_parity_sectors_are_orthogonal(self, bc, q):
        Pp, Pm = (build_sector_basis(SectorSpec(bc, 5, 5, Q=q, parity=p)).projector() for p in (1, -1))
        assert abs((Pp.T @ Pm).toarray()).max() < 1e-14

    @pytest.mark.parametrize("parity", [1, -1])
    def test_projector_columns_have_definite_parity(self, parity):
        b = build_sector_basis(SectorSpec("hwbc", 4, 5, parity=parity))
        full = enumerate_basis(4, 5)
        R = np.zeros((len(full), len(full)))
        R[rank_states(full[:, ::-1], 4), np.arange(len(full))] = 1
        P = b.projector().toarray()
        assert np.allclose(R @ P, parity * P, atol=1e-14)

    def test_representatives_are_orbit_minima(self):
        b = build_sector_basis(SectorSpec("pbc", 4, 4, Q=0, parity=1))
        for rep in b.reps.tolist():
            orbit = [translate(rep, a).tolist() for a in range(4)]
            orbit += [reflect(s).tolist() for s in orbit]
            assert rep == min(orbit)

    def test_antisymmetric_fixed_points_are_excluded(self):
        b = build_sector_basis(SectorSpec("hwbc", 3, 3, parity=-1))
        assert b.index_of([1, 1, 1]) == -1
        assert b.index_of([0, 3, 0]) == -1
        assert b.index_of([2, 0, 1]) == b.index_of([1, 0, 2]) >= 0

    def test_index_of_rejects_invalid_states(self):
        b = build_sector_basis(SectorSpec("hwbc", 3, 3, parity=1))
        with pytest.raises(InvalidStateError):
            b.index_of([1, 1])

    def test_every_state_maps_once(self):
        b = build_sector_basis(SectorSpec("pbc", 5, 5, Q=0, parity=-1))
        idx, _ = b.lookup(enumerate_basis(5, 5))
        counts = np.bincount(idx[idx >= 0], minlength=b.dim)
        # each basis vector collects its whole dihedral orbit
        orbit_sizes = [
            len({tuple(translate(s, a)) for a in range(5)} | {tuple(reflect(translate(s, a))) for a in range(5)})
            for s in b.reps.tolist()
        ]
        assert counts.tolist() == orbit_sizes
