from fractions import Fraction

import pytest

from hypothesis import given
from hypothesis import strategies as st

from group_kstab import linalg
from group_kstab.rootdata import (
    DegenerateGram,
    InvalidRootData,
    NonCrystallographic,
    WeylGroupTooLarge,
    build_root_system,
    cartan_root_system,
    chamber_membership,
    check_lattice_pairings,
    dominant_representative,
    weyl_group_order,
)

F = Fraction


@pytest.mark.unit
@pytest.mark.rootdata
class TestBuildRootSystem:
    def test_torus_has_trivial_weyl_group(self):
        rs = build_root_system(2, [[1, 0], [0, 1]], [])
        assert rs.is_torus
        assert len(rs.weyl_group) == 1
        assert rs.positive_roots == ()
        assert rs.rho == (F(0), F(0))
        assert rs.n == 2
        assert rs.toric_rank == 2

    def test_a1_from_explicit_data(self):
        rs = build_root_system(1, [["1/2"]], [[2]], cartan_type="A1")
        assert rs.positive_roots == ((F(2),),)
        assert rs.rho == (F(1),)
        assert rs.fundamental_weights == ((F(1),),)
        assert len(rs.weyl_group) == 2
        assert rs.n == 3
        assert rs.toric_rank == 0

    def test_a2_in_weight_coordinates(self):
        rs = build_root_system(2, [["2/3", "1/3"], ["1/3", "2/3"]], [[2, -1], [-1, 2]])
        assert set(rs.positive_roots) == {(F(2), F(-1)), (F(-1), F(2)), (F(1), F(1))}
        assert rs.rho == (F(1), F(1))
        assert rs.fundamental_weights == ((F(1), F(0)), (F(0), F(1)))
        assert len(rs.weyl_group) == 6
        assert rs.n == 8

    def test_degenerate_gram(self):
        with pytest.raises(DegenerateGram) as exc_info:
            build_root_system(2, [[1, 0], [0, 0]], [])
        assert exc_info.value.tag == "rootdata.DegenerateGram"
        assert exc_info.value.exit_code == 2

    def test_non_symmetric_gram_is_degenerate(self):
        with pytest.raises(DegenerateGram):
            build_root_system(2, [[1, 1], [0, 1]], [])

    def test_non_crystallographic_pair(self):
        with pytest.raises(NonCrystallographic) as exc_info:
            build_root_system(2, [[1, 0], [0, 1]], [[1, 0], [-1, 2]])
        assert exc_info.value.details["pair"] == [1, 2]

    def test_acute_simple_roots_rejected(self):
        with pytest.raises(NonCrystallographic):
            build_root_system(2, [[1, 0], [0, 1]], [[1, 0], [1, 1]])

    @pytest.mark.parametrize(
        "rank, gram, roots",
        [
            (0, [], []),
            (2, [[1, 0]], []),
            (2, [[1, 0], [0, 1]], [[1, 0, 0]]),
            (2, [[1, 0], [0, 1]], [[1, 0], [2, 0]]),
            (1, [[0.5]], []),
        ],
    )
    def test_invalid_shapes(self, rank, gram, roots):
        with pytest.raises(InvalidRootData):
            build_root_system(rank, gram, roots)

    def test_weyl_group_cap(self):
        with pytest.raises(WeylGroupTooLarge) as exc_info:
            cartan_root_system("A3", weyl_group_cap=10)
        assert exc_info.value.details["cap"] == 10


@pytest.mark.unit
@pytest.mark.rootdata
class TestCartanTypes:
    @pytest.mark.parametrize(
        "cartan_type, positive, order",
        [("A1", 1, 2), ("A2", 3, 6), ("A3", 6, 24), ("B2", 4, 8), ("C3", 9, 48), ("G2", 6, 12)],
    )
    def test_root_counts_and_group_order(self, cartan_type, positive, order):
        rs = cartan_root_system(cartan_type)
        assert len(rs.positive_roots) == positive
        assert len(rs.weyl_group) == order == weyl_group_order(cartan_type)

    @pytest.mark.parametrize("cartan_type", ["A2", "B2", "C3", "G2"])
    def test_rho_pairs_to_one_with_simple_coroots(self, cartan_type):
        rs = cartan_root_system(cartan_type)
        for alpha in rs.simple_roots:
            assert 2 * rs.inner(rs.rho, alpha) / rs.norm_squared(alpha) == 1

    @pytest.mark.parametrize("cartan_type", ["A2", "B2", "G2"])
    def test_weyl_group_preserves_gram(self, cartan_type):
        rs = cartan_root_system(cartan_type)
        for w in rs.weyl_group:
            assert linalg.mat_mul(linalg.mat_mul(linalg.transpose(w), rs.gram), w) == rs.gram

    def test_toric_block_is_appended(self):
        rs = cartan_root_system("A1", 1)
        assert rs.rank == 2
        assert rs.cartan_type == "A1+T1"
        assert rs.t_basis == ((F(0), F(1)),)
        assert rs.n == 4

    def test_split_separates_toric_part(self):
        rs = cartan_root_system("A1", 1)
        v_t, v_ss = rs.split((F(3), F(5)))
        assert v_ss == (F(3), F(0))
        assert v_t == (F(0), F(5))

    @pytest.mark.parametrize("cartan_type", ["E8", "G3", "A0", "X2"])
    def test_unsupported_types(self, cartan_type):
        with pytest.raises(InvalidRootData):
            cartan_root_system(cartan_type)


@pytest.mark.unit
@pytest.mark.rootdata
class TestChamberMembership:
    @pytest.fixture
    def a2(self):
        return cartan_root_system("A2")

    def test_interior_point(self, a2):
        certificate = chamber_membership(a2, (F(1), F(1)), "interior_Xi")
        assert certificate.holds
        assert certificate.coefficients == (F(1), F(1))

    def test_fundamental_weight_lies_in_open_cone(self, a2):
        certificate = chamber_membership(a2, (F(1), F(0)), "interior_Xi")
        assert certificate.holds
        assert certificate.coefficients == (F(2, 3), F(1, 3))

    def test_negative_coefficient_names_violation(self, a2):
        certificate = chamber_membership(a2, (F(-1), F(0)), "interior_Xi")
        assert not certificate.holds
        assert certificate.violated == "c_1"
        assert certificate.violated_value == F(-2, 3)

    def test_boundary_is_in_closure_only(self, a2):
        wall = (F(2), F(-1))
        assert chamber_membership(a2, linalg.zeros(2), "closure_Xi").holds
        assert not chamber_membership(a2, linalg.zeros(2), "interior_Xi").holds
        assert chamber_membership(a2, wall, "closure_Xi").holds
        assert not chamber_membership(a2, wall, "interior_Xi").holds

    def test_dominant_mode(self, a2):
        assert chamber_membership(a2, (F(1), F(0)), "dominant").holds
        certificate = chamber_membership(a2, (F(1), F(-1)), "dominant")
        assert not certificate.holds
        assert certificate.violated.startswith("positive_root[")

    def test_torus_convention(self):
        torus = build_root_system(2, [[1, 0], [0, 1]], [])
        origin = chamber_membership(torus, linalg.zeros(2), "interior_Xi")
        assert origin.holds
        assert origin.degenerate
        off = chamber_membership(torus, (F(1), F(0)), "interior_Xi")
        assert not off.holds
        assert off.violated == "toric_component"

    def test_toric_component_fails_membership(self):
        rs = cartan_root_system("A1", 1)
        certificate = chamber_membership(rs, (F(1), F(1, 2)), "closure_Xi")
        assert not certificate.holds
        assert certificate.toric_component == (F(0), F(1, 2))

    def test_xi_margin(self):
        rs = build_root_system(1, [["1/2"]], [[2]])
        assert rs.xi_margin((F(1, 2),)) == F(1, 2)
        assert build_root_system(1, [[1]], []).xi_margin((F(0),)) is None


@pytest.mark.unit
@pytest.mark.rootdata
def test_lattice_pairing_warnings():
    rs = build_root_system(1, [["1/2"]], [[2]])
    assert check_lattice_pairings(rs, [(F(1),), (F(-1),)]) == []
    warnings = check_lattice_pairings(rs, [(F(1, 4),)])
    assert len(warnings) == 1
    assert "1/2" in warnings[0]


_B2 = cartan_root_system("B2")


@pytest.mark.unit
@pytest.mark.property
@given(st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_dominant_representative_is_in_orbit(coordinates):
    """w·v is dominant and w is a Weyl group element."""
    v = linalg.vector(coordinates)
    w, image = dominant_representative(_B2, v)
    assert w in _B2.weyl_group
    assert linalg.mat_vec(w, v) == image
    assert chamber_membership(_B2, image, "dominant").holds
