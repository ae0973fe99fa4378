import math
import random
from fractions import Fraction

import pytest

from detnorm.arithmetic import INFINITE_PLACE, CyclicCharacter, relevant_places
from detnorm.brauer import (
    BoundaryPointError,
    BrauerClass,
    det_is_norm,
    det_local_value,
    expand_class_group,
    load_brauer_class,
    local_character_value,
    local_kernel_indicator,
    reciprocity_places,
    zero_locus_indicator,
)
from detnorm.enumeration import MatrixPoint

CHI4 = CyclicCharacter.from_generators(4, 2, [(3, 1)])
CHI7 = CyclicCharacter.from_generators(7, 3, [(3, 1)])
CHI5 = CyclicCharacter.from_generators(5, 4, [(2, 1)])
B2 = BrauerClass(2, CHI4)
B3 = BrauerClass(3, CHI7)


def random_point(rng, n=2, spread=9):
    while True:
        entries = [rng.randint(-spread, spread) for _ in range(n * n)]
        if any(entries):
            pt = MatrixPoint.from_entries(entries)
            if pt.det() != 0:
                return pt


class TestBrauerClass:
    def test_order(self):
        assert B2.order == 2 and B3.order == 3

    def test_order_must_divide_n(self):
        with pytest.raises(ValueError):
            BrauerClass(2, CHI7)  # 3 does not divide 2
        with pytest.raises(ValueError):
            BrauerClass(3, CHI4)
        BrauerClass(4, CHI5)  # 4 | 4 fine

    def test_load(self, tmp_path):
        (tmp_path / "chi.json").write_text(
            '{"conductor": 4, "order": 2, "generator_values": [[3, 1]]}')
        (tmp_path / "class.json").write_text('{"n": 2, "character_file": "chi.json"}')
        b = load_brauer_class(str(tmp_path / "class.json"))
        assert b == B2


class TestZeroLocus:
    def test_identity_always_inside(self):
        for b in (B2, B3, BrauerClass(4, CHI5)):
            assert zero_locus_indicator(MatrixPoint.identity(b.n), b)

    def test_det3_outside(self):
        assert not zero_locus_indicator(MatrixPoint(2, (1, 0, 0, 3)), B2)

    def test_det5_inside(self):
        assert zero_locus_indicator(MatrixPoint(2, (2, 1, 1, 3)), B2)

    def test_boundary_error(self):
        with pytest.raises(BoundaryPointError):
            zero_locus_indicator(MatrixPoint(2, (1, 0, 0, 0)), B2)

    def test_representative_sign_invariance(self):
        # det(-M) = det(M) for n=2; for n=3 the sign flips, but -1 = N(-1)
        # for an odd-order cyclic field, so the indicator cannot see it
        rng = random.Random(7)
        for _ in range(100):
            pt = random_point(rng, 3)
            assert det_is_norm(pt.det(), B3) == det_is_norm(-pt.det(), B3)

    def test_scaling_invariance(self):
        # det(lambda M) = lambda^n det(M); n-th powers are norms since d | n
        rng = random.Random(11)
        for _ in range(100):
            pt = random_point(rng)
            lam = rng.randint(1, 20)
            assert det_is_norm(pt.det(), B2) == det_is_norm(lam**2 * pt.det(), B2)
        for _ in range(50):
            pt = random_point(rng, 3)
            lam = rng.choice([-5, -2, 2, 3, 7])
            assert det_is_norm(pt.det(), B3) == det_is_norm(lam**3 * pt.det(), B3)


class TestLocalValues:
    def test_identity_zero_everywhere(self):
        for v in (INFINITE_PLACE, 2, 3, 5, 7, 11):
            assert local_character_value(MatrixPoint.identity(2), B2, v) == 0

    def test_det3_value_at_3(self):
        pt = MatrixPoint(2, (1, 0, 0, 3))
        assert local_character_value(pt, B2, 3) == 1

    def test_reciprocity_spec_example(self):
        pt = MatrixPoint(2, (1, 0, 0, 3))
        total = sum(local_character_value(pt, B2, v) for v in (2, 3, INFINITE_PLACE))
        assert total % 2 == 0

    def test_zero_outside_relevant_places(self):
        # the local value vanishes at any prime away from the conductor and
        # the determinant's support, so finitely many places see the point
        rng = random.Random(23)
        for _ in range(100):
            pt = random_point(rng)
            relevant = set()
            for v in reciprocity_places(pt.det(), B2):
                if v is not INFINITE_PLACE:
                    relevant.add(v)
            for p in (3, 5, 7, 11, 13, 17, 19, 23):
                if p not in relevant:
                    assert local_character_value(pt, B2, p) == 0

    def test_global_reciprocity_random(self):
        rng = random.Random(3)
        for _ in range(1000):
            n, b = (2, B2) if rng.random() < 0.7 else (3, B3)
            pt = random_point(rng, n)
            places = reciprocity_places(pt.det(), b)
            total = sum(det_local_value(pt.det(), b, v) for v in places)
            assert total % b.order == 0, (pt, b.order)

    def test_bilinearity_on_matrix_products(self):
        # local value of a product point = sum of local values (mod d);
        # contents scale dets by n-th powers, which every chi_v kills
        rng = random.Random(5)
        for _ in range(200):
            p1 = random_point(rng)
            p2 = random_point(rng)
            r1, r2 = p1.rows(), p2.rows()
            prod = [[sum(r1[i][k] * r2[k][j] for k in range(2)) for j in range(2)]
                    for i in range(2)]
            flat = [x for row in prod for x in row]
            pt = MatrixPoint.from_entries(flat)
            for v in relevant_places(Fraction(p1.det() * p2.det()), Fraction(2)):
                lhs = local_character_value(pt, B2, v)
                rhs = (local_character_value(p1, B2, v)
                       + local_character_value(p2, B2, v)) % 2
                assert lhs == rhs


class TestKernelIndicator:
    def test_identity_is_one(self):
        for classes in ([B2], [B3], [BrauerClass(4, CHI5)]):
            n = classes[0].n
            for v in (INFINITE_PLACE, 2, 5, 7):
                assert local_kernel_indicator(MatrixPoint.identity(n), classes, v) == 1

    def test_order_two_non_norm(self):
        pt = MatrixPoint(2, (1, 0, 0, 3))
        assert local_kernel_indicator(pt, [B2], 3) == 0

    def test_always_zero_or_one_and_matches_kernel_membership(self):
        rng = random.Random(13)
        b4 = BrauerClass(4, CHI5)
        for _ in range(300):
            classes = rng.choice([[B2], [B3], [b4], [b4, BrauerClass(4, CHI4)]])
            n = classes[0].n
            pt = random_point(rng, n)
            v = rng.choice([INFINITE_PLACE, 2, 3, 5, 7, 13])
            ind = local_kernel_indicator(pt, classes, v)
            assert ind in (Fraction(0), Fraction(1))
            member = all(det_local_value(pt.det(), c, v) == 0 for c in classes)
            assert (ind == 1) == member

    def test_matches_complex_average(self):
        # brute force over the generated group with floating roots of unity
        rng = random.Random(17)
        b4 = BrauerClass(4, CHI5)
        for _ in range(100):
            pt = random_point(rng, 4, spread=5)
            v = rng.choice([INFINITE_PLACE, 2, 3, 5, 7])
            group = expand_class_group([b4])
            acc = 0j
            for c in group:
                w = det_local_value(pt.det(), c, v)
                acc += complex(math.cos(2 * math.pi * w / c.order),
                               math.sin(2 * math.pi * w / c.order))
            approx = abs(acc) / len(group)
            exact = local_kernel_indicator(pt, [b4], v)
            assert abs(approx - float(exact)) < 1e-9

    def test_group_expansion(self):
        group = expand_class_group([BrauerClass(4, CHI5)])
        assert len(group) == 4  # chi5 has order 4
        orders = sorted(c.order for c in group)
        assert orders == [1, 2, 4, 4]
