import math

import numpy as np
import pytest
import scipy.special
from scipy.integrate import simpson

from gategeom.errors import RangeError, ValidationError
from gategeom.gates import NAMED_GATE_POINTS
from gategeom.quadrature import box_integral_chamber_clipped
from gategeom.volumes import (
    CNOT_SWAP_MIDPOINT,
    CUBE_SMALL_SIDE_EXPONENTS,
    PE_VOLUME_CLOSED,
    Region,
    VolumeResult,
    cube_volume_closed,
    cube_volume_quadrature,
    cylinder_volume_g,
    cylinder_volume_quadrature,
    elliptic_E,
    elliptic_K,
    is_perfect_entangler,
    origin_volume_g,
    origin_volume_quadrature,
    pe_volume,
    region_volume_mc,
)

ALL_CLOSED_FORM_POINTS = dict(NAMED_GATE_POINTS) | {
    "cnot-swap-midpoint": CNOT_SWAP_MIDPOINT
}


class TestPerfectEntanglerPredicate:
    def test_pinned_memberships(self):
        assert is_perfect_entangler((np.pi / 2, np.pi / 4, 0.0))
        assert is_perfect_entangler((np.pi / 2, 0.0, 0.0))  # wedge boundary
        assert is_perfect_entangler((np.pi / 4, np.pi / 4, np.pi / 4))
        assert is_perfect_entangler(CNOT_SWAP_MIDPOINT)
        assert not is_perfect_entangler((0.0, 0.0, 0.0))
        assert not is_perfect_entangler((np.pi / 2, np.pi / 2, np.pi / 2))

    def test_broadcasts(self):
        flags = is_perfect_entangler(
            [[np.pi / 2, np.pi / 4, 0.0], [0.1, 0.05, 0.0]]
        )
        np.testing.assert_array_equal(flags, [True, False])

    def test_rejects_points_outside_chamber(self):
        with pytest.raises(ValidationError):
            is_perfect_entangler((0.2, 0.6, 0.1))


class TestPeVolume:
    def test_closed_value(self):
        result = pe_volume()
        assert isinstance(result, VolumeResult)
        assert result.value == 8.0 / (3.0 * np.pi) == PE_VOLUME_CLOSED

    def test_quadrature_agrees(self):
        result = pe_volume("quadrature", resolution=200)
        assert result.value == pytest.approx(PE_VOLUME_CLOSED, abs=1e-6)
        assert result.error_estimate is not None

    def test_monte_carlo_agrees(self):
        result = pe_volume("mc", samples=200_000, seed=11)
        assert abs(result.value - PE_VOLUME_CLOSED) <= 3.0 * result.error_estimate
        assert result.error_estimate == pytest.approx(
            math.sqrt(PE_VOLUME_CLOSED * (1 - PE_VOLUME_CLOSED) / 200_000), rel=0.05
        )

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            pe_volume("bootstrap")


class TestCubeClosedForms:
    @pytest.mark.parametrize("name", sorted(ALL_CLOSED_FORM_POINTS))
    @pytest.mark.parametrize("side", [0.15, 0.4])
    def test_named_points_match_quadrature(self, name, side):
        center = ALL_CLOSED_FORM_POINTS[name]
        closed = cube_volume_closed(center, side)
        quad = cube_volume_quadrature(center, side, order=30)
        assert closed == pytest.approx(quad, rel=1e-10)

    def test_identity_and_swap_share_the_same_mass(self):
        for side in (0.2, 0.5):
            assert cube_volume_closed((0.0, 0.0, 0.0), side) == cube_volume_closed(
                (np.pi / 2, np.pi / 2, np.pi / 2), side
            )

    @pytest.mark.parametrize("c1", [0.3, 0.8, 1.4])
    def test_axis_family_matches_quadrature(self, c1):
        closed = cube_volume_closed((c1, 0.0, 0.0), 0.25)
        quad = cube_volume_quadrature((c1, 0.0, 0.0), 0.25, order=30)
        assert closed == pytest.approx(quad, rel=1e-10)

    @pytest.mark.parametrize("side", [0.1, 0.24])
    def test_interior_formula_matches_quadrature(self, side):
        center = (0.9, 0.5, 0.25)
        closed = cube_volume_closed(center, side)
        quad = cube_volume_quadrature(center, side, order=30)
        assert closed == pytest.approx(quad, rel=1e-12)

    def test_monotone_in_side(self):
        values = [
            cube_volume_closed((np.pi / 2, np.pi / 4, 0.0), a)
            for a in np.linspace(0.05, 0.7, 8)
        ]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_small_side_leading_terms(self):
        a = 0.01
        b_gate = cube_volume_closed((np.pi / 2, np.pi / 4, 0.0), a)
        assert b_gate == pytest.approx(12.0 * a**3 / np.pi, rel=1e-3)
        a = 0.05
        identity = cube_volume_closed((0.0, 0.0, 0.0), a)
        assert identity == pytest.approx(a**9 / (40.0 * np.pi), rel=2e-3)

    def test_small_side_exponent_table(self):
        assert CUBE_SMALL_SIDE_EXPONENTS == {
            "identity": 9,
            "swap": 9,
            "sqrt-swap": 6,
            "b-gate": 3,
            "cnot": 5,
            "cphase": 5,
            "dcnot": 5,
            "cnot-swap-midpoint": 4,
        }
        a = 0.02
        for name, exponent in CUBE_SMALL_SIDE_EXPONENTS.items():
            center = ALL_CLOSED_FORM_POINTS[name]
            ratio = cube_volume_closed(center, 2 * a) / cube_volume_closed(center, a)
            assert math.log2(ratio) == pytest.approx(exponent, abs=0.05)

    def test_range_errors_point_to_quadrature(self):
        with pytest.raises(RangeError, match="cube_volume_quadrature"):
            cube_volume_closed((np.pi / 2, np.pi / 4, 0.0), 1.0)
        with pytest.raises(RangeError, match="cube_volume_quadrature"):
            cube_volume_closed((0.3, 0.0, 0.0), 0.7)
        with pytest.raises(RangeError, match="cube_volume_quadrature"):
            cube_volume_closed((0.9, 0.5, 0.25), 0.6)

    def test_input_validation(self):
        with pytest.raises(ValidationError):
            cube_volume_closed((0.0, 0.0), 0.1)
        with pytest.raises(ValidationError):
            cube_volume_closed((0.0, 0.0, 0.0), -0.1)
        with pytest.raises(ValidationError):
            cube_volume_quadrature((0.0, 0.0, 0.0), 0.1, clip="both")


class TestEllipticIntegrals:
    def test_pinned_values(self):
        assert elliptic_K(0.0) == pytest.approx(np.pi / 2, abs=1e-15)
        assert elliptic_E(0.0) == pytest.approx(np.pi / 2, abs=1e-15)
        assert elliptic_E(1.0) == 1.0

    def test_against_scipy(self):
        for k in (0.1, 0.5, 0.9, 0.999):
            assert elliptic_K(k) == pytest.approx(scipy.special.ellipk(k * k), rel=1e-12)
            assert elliptic_E(k) == pytest.approx(scipy.special.ellipe(k * k), rel=1e-12)

    def test_against_defining_integrals(self):
        theta = np.linspace(0.0, np.pi / 2, 20_001)
        k = 0.5
        base = 1.0 - (k * np.sin(theta)) ** 2
        assert elliptic_K(k) == pytest.approx(
            simpson(1.0 / np.sqrt(base), x=theta), abs=1e-10
        )
        assert elliptic_E(k) == pytest.approx(simpson(np.sqrt(base), x=theta), abs=1e-10)

    def test_domain_validation(self):
        with pytest.raises(ValidationError):
            elliptic_K(1.0)
        with pytest.raises(ValidationError):
            elliptic_K(-0.1)
        with pytest.raises(ValidationError):
            elliptic_E(1.2)


class TestCylinderVolumes:
    @pytest.mark.parametrize(
        "radius", [0.25, 0.5 * (1 - 1e-6), 0.5 * (1 + 1e-6), 1.0]
    )
    def test_closed_matches_quadrature_across_the_branch(self, radius):
        closed = cylinder_volume_g((0.5, 0.0), radius, 0.2)
        quad = cylinder_volume_quadrature((0.5, 0.0), radius, 0.2)
        assert closed == pytest.approx(quad, rel=1e-9)

    def test_continuous_across_the_branch_point(self):
        rho = 0.5
        below = cylinder_volume_g((rho, 0.0), rho * (1 - 1e-9), 0.2)
        above = cylinder_volume_g((rho, 0.0), rho * (1 + 1e-9), 0.2)
        assert above == pytest.approx(below, rel=1e-7)

    def test_origin_axis_form(self):
        assert cylinder_volume_g((0.0, 0.0), 0.3, 0.4) == pytest.approx(
            6.0 * 0.3 * 0.4, rel=1e-15
        )

    def test_small_radius_asymptote(self):
        # Far from the divergence axis the density is locally constant,
        # so the mass tends to 3 R^2 h / rho.
        rho, R, h = 0.9, 0.05, 0.2
        assert cylinder_volume_g((rho, 0.0), R, h) == pytest.approx(
            3.0 * R * R * h / rho, rel=5e-3
        )

    def test_degenerate_sizes(self):
        assert cylinder_volume_g((0.5, 0.0), 0.0, 0.2) == pytest.approx(0.0, abs=1e-15)
        assert cylinder_volume_quadrature((0.5, 0.0), 0.2, 0.0) == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            cylinder_volume_g((0.5, 0.0), -0.1, 0.2)
        with pytest.raises(ValidationError):
            cylinder_volume_quadrature((0.5, 0.0), 0.1, -0.2)


class TestOriginVolumes:
    def test_cube_closed_form(self):
        a = 0.2
        assert origin_volume_g("cube", a) == pytest.approx(
            12.0 * a * a / np.pi * math.log(1.0 + math.sqrt(2.0)), rel=1e-15
        )

    @pytest.mark.parametrize("shape", ["cube", "cylinder", "sphere"])
    def test_closed_matches_quadrature(self, shape):
        kwargs = {"height": 0.15} if shape == "cylinder" else {}
        closed = origin_volume_g(shape, 0.2, **kwargs)
        quad = origin_volume_quadrature(shape, 0.2, **kwargs)
        assert closed == pytest.approx(quad, rel=1e-6)

    def test_sphere_and_cylinder_forms(self):
        assert origin_volume_g("sphere", 0.25) == pytest.approx(3.0 * np.pi * 0.0625)
        assert origin_volume_g("cylinder", 0.1, height=0.3) == pytest.approx(0.18)

    def test_validation(self):
        with pytest.raises(ValidationError):
            origin_volume_g("torus", 0.1)
        with pytest.raises(ValidationError):
            origin_volume_g("cylinder", 0.1)
        with pytest.raises(ValidationError):
            origin_volume_g("cube", -0.1)


class TestRegionMonteCarlo:
    def test_chamber_mass_is_exactly_one(self):
        result = region_volume_mc(Region("chamber"), samples=10_000, seed=3)
        assert result.value == 1.0
        assert result.error_estimate == 0.0

    def test_unclipped_cube_tracks_the_closed_form(self):
        closed = cube_volume_closed((np.pi / 2, np.pi / 4, 0.0), 0.3)
        result = region_volume_mc(
            Region("cube_c", (np.pi / 2, np.pi / 4, 0.0), 0.3, clip="unclipped"),
            samples=200_000,
            seed=5,
        )
        assert abs(result.value - closed) <= 3.0 * result.error_estimate

    def test_clipped_cube_tracks_clipped_quadrature(self):
        center = np.full(3, np.pi / 4)
        reference = box_integral_chamber_clipped(center - 0.2, center + 0.2)
        result = region_volume_mc(
            Region("cube_c", tuple(center), 0.4), samples=200_000, seed=6
        )
        assert abs(result.value - reference) <= 3.0 * result.error_estimate

    def test_sphere_tracks_the_origin_form(self):
        result = region_volume_mc(
            Region("sphere_g", (0.0, 0.0, 0.0), 0.05), samples=400_000, seed=7
        )
        assert abs(result.value - 3.0 * np.pi * 0.05**2) <= 3.0 * result.error_estimate

    def test_worker_split_does_not_change_the_estimate(self):
        region = Region("pe")
        one = region_volume_mc(region, samples=50_000, seed=8, worker_count=1)
        four = region_volume_mc(region, samples=50_000, seed=8, worker_count=4)
        assert one.value == four.value

    def test_region_validation(self):
        with pytest.raises(ValidationError):
            Region("sphere_g", (0.0, 0.0, 0.0), 0.1, clip="unclipped")
        with pytest.raises(ValidationError):
            Region("pe", clip="reflect")
        with pytest.raises(ValidationError):
            region_volume_mc(Region("blob"), samples=100)
        with pytest.raises(ValidationError):
            region_volume_mc(Region("pe"), samples=0)
