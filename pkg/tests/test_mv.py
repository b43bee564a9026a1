from math import comb

import pytest

from derham import (InvalidInputError, MVIndex, cech_complex, family_for_cech,
                    family_for_mv, family_for_support, mv_complex,
                    mv_tensor_cech, parse_polynomial)


def polys(n, *texts):
    return [parse_polynomial(t, n) for t in texts]


def test_sign_bookkeeping():
    idx = MVIndex((1, 3))
    assert idx.sgn(0) == 2
    assert idx.sgn(2) == 1
    assert idx.sgn(5) == 0
    with pytest.raises(InvalidInputError):
        idx.sgn(3)
    with pytest.raises(InvalidInputError):
        MVIndex((2, 1))


def test_mv_degenerates_for_one_polynomial():
    fam = family_for_mv(1, polys(1, "x1"))
    c = mv_complex(fam, 1)
    assert c.lo == 0 and c.hi == 0
    assert c.modules[0].rank == 1
    rels = [r.components[0] for r in c.modules[0].relations]
    assert [str(r) for r in rels] == ["x1*d1 + 1"]


def test_mv_two_polynomials_maps():
    fam = family_for_mv(2, polys(2, "x1", "x2"))
    c = mv_complex(fam, 2)
    assert [m.rank for m in c.modules] == [2, 1]
    rows = c.differentials[0].rows
    assert str(rows[0].components[0]) == "x2"
    assert str(rows[1].components[0]) == "-x1"
    c.check_chain()


def test_mv_component_counts():
    fam = family_for_mv(2, polys(2, "x1", "x2", "x1 + x2"))
    c = mv_complex(fam, 3)
    assert [m.rank for m in c.modules] == [comb(3, k) for k in (1, 2, 3)]
    c.check_chain()


def test_mv_rejects_empty():
    with pytest.raises(InvalidInputError):
        family_for_mv(1, [])


def test_cech_shapes():
    fam = family_for_cech(2, polys(2, "x2"))
    c = cech_complex(fam, 1)
    assert [m.rank for m in c.modules] == [1, 1]
    # degree-0 entry is R itself: relations generated by the derivatives
    rels = sorted(str(r.components[0]) for r in c.modules[0].relations)
    assert rels == ["d1", "d2"]

    fam2 = family_for_cech(2, polys(2, "x1", "x2"))
    c2 = cech_complex(fam2, 2)
    assert [m.rank for m in c2.modules] == [1, 2, 1]
    c2.check_chain()


def test_cech_rejects_zero_polynomial():
    with pytest.raises(InvalidInputError):
        family_for_cech(1, polys(1, "0"))


def test_tensor_single_factors():
    fam = family_for_support(2, polys(2, "x1"), polys(2, "x2"))
    c = mv_tensor_cech(fam, 1, 1)
    assert [m.rank for m in c.modules] == [1, 1]
    # degree 0 block is R_x, degree 1 block is R_xy
    assert sorted(str(r.components[0]) for r in c.modules[1].relations) == \
        ["x1*d1 + 1", "x2*d2 + 1"]
    c.check_chain()


def test_tensor_counts():
    fam = family_for_support(2, polys(2, "x1", "x2"), polys(2, "x1 - 1"))
    c = mv_tensor_cech(fam, 2, 1)
    # total degree t has sum over |I| + |J| = t + 1 of binomial products
    expected = []
    for t in range(0, 3):
        total = 0
        for isize in range(1, 3):
            jsize = t + 1 - isize
            if 0 <= jsize <= 1:
                total += comb(2, isize) * comb(1, jsize)
        expected.append(total)
    assert [m.rank for m in c.modules] == expected
    c.check_chain()


def test_tensor_with_unit_support():
    fam = family_for_support(2, polys(2, "x1"), polys(2, "1"))
    c = mv_tensor_cech(fam, 1, 1)
    assert [m.rank for m in c.modules] == [1, 1]
    c.check_chain()
