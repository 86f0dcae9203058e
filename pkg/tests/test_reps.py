"""Representation layer: construction, traces, symmetry plumbing."""

from dataclasses import replace

import numpy as np
import pytest

from tracebench.errors import RelatorViolation, SingularImage
from tracebench.fuchsian import free_reduce, word_inverse
from tracebench.reps import (
    CharacterPoint,
    character_rep,
    conjugate_rep,
    from_generator_images,
    rep_from_json,
    similar_rep,
    trace_on_class,
    unitarity_defect,
)


def test_trivial_rank3():
    r = from_generator_images([np.eye(3)] * 4)
    assert r.dim == 3
    assert r.relator_residual == 0.0
    assert unitarity_defect(r) == 0.0


def test_scalar_images_always_close_relator():
    r = from_generator_images([[[2.0]], [[1.0]], [[1.0]], [[1.0]]])
    assert r.dim == 1
    assert r.relator_residual < 1e-14


def test_relator_violation():
    mats = [np.eye(2) for _ in range(4)]
    mats[0] = np.eye(2) + 0.1 * np.array([[0.0, 1.0], [0.0, 0.0]])
    # commutator [a1,b1] = a1 b1 a1^-1 b1^-1 with b1 = Id is a1 a1^-1 = Id,
    # so perturbing a1 alone is not enough; perturb two non-commuting images
    mats[1] = np.eye(2) + 0.1 * np.array([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(RelatorViolation):
        from_generator_images(mats, tol=1e-8)


def test_singular_image_rejected():
    mats = [np.eye(2)] * 3 + [np.zeros((2, 2))]
    with pytest.raises(SingularImage):
        from_generator_images(mats)


def test_character_basics():
    triv = character_rep(CharacterPoint((1, 1, 1, 1)))
    assert triv.dim == 1 and triv.relator_residual == 0.0
    assert unitarity_defect(triv) == 0.0

    th = 0.7
    uni = character_rep(CharacterPoint((np.exp(1j * th), 1, 1, 1)))
    assert unitarity_defect(uni) < 1e-15

    nonuni = character_rep(CharacterPoint((2, 1, 1, 1)))
    assert unitarity_defect(nonuni) == pytest.approx(3.0, abs=1e-14)

    with pytest.raises(ValueError):
        CharacterPoint((0, 1, 1, 1))
    with pytest.raises(ValueError):
        CharacterPoint((1, 1, 1))


def test_trace_on_class_scalar_power(classes_L6):
    r = character_rep(CharacterPoint((2, 1, 1, 1)))
    c = replace(classes_L6[0], rep_word=(1, 1))
    assert trace_on_class(r, c) == pytest.approx(4.0)
    c3 = replace(classes_L6[0], rep_word=(1, 1, 1))
    assert trace_on_class(r, c3) == pytest.approx(8.0)


def test_trace_is_class_function(group, classes_L6, rng):
    # conjugating the representative word must not move the trace; this is
    # the main thing the geometric side relies on
    reps = [
        character_rep(CharacterPoint((np.exp(0.3), 1, 1, 1))),
        from_generator_images(group.generators),  # the Fuchsian rep itself
    ]
    alphabet = [1, -1, 2, -2, 3, -3, 4, -4]
    for r in reps:
        for c in (classes_L6[0], classes_L6[30], classes_L6[70]):
            t0 = trace_on_class(r, c)
            for _ in range(5):
                w = tuple(int(x) for x in rng.choice(alphabet, 4))
                cw = free_reduce(w + c.rep_word + word_inverse(w))
                t1 = trace_on_class(r, replace(c, rep_word=cw))
                assert abs(t1 - t0) <= 1e-10 * max(1.0, abs(t0))


def test_fuchsian_rep_traces_match_class_traces(group, classes_L6):
    # the side-pairing matrices are themselves a 2-dim representation; its
    # character must agree with the stored SL2 traces up to the PSL sign
    r = from_generator_images(group.generators)
    assert r.relator_residual < 1e-9
    for c in classes_L6[::11]:
        assert abs(trace_on_class(r, c)) == pytest.approx(abs(c.trace), abs=1e-8)


def test_abelianization_oracle(classes_L6, rng):
    # diagonal rank-2 rep built from two characters: trace must equal the
    # sum of the two scalar characters evaluated at the exponent vector
    z1 = (1.3 + 0.4j, 0.9, 1.1j, 0.7 - 0.2j)
    z2 = (0.8, 1.0 + 0.5j, 1.2, 0.95j)
    mats = [np.diag([a, b]) for a, b in zip(z1, z2)]
    r = from_generator_images(mats, tol=1e-10)
    ch1 = character_rep(CharacterPoint(z1))
    ch2 = character_rep(CharacterPoint(z2))
    for c in classes_L6[::13]:
        n = [0, 0, 0, 0]
        for letter in c.rep_word:
            n[abs(letter) - 1] += 1 if letter > 0 else -1
        expect = np.prod([z ** k for z, k in zip(z1, n)]) + np.prod(
            [z ** k for z, k in zip(z2, n)]
        )
        got = trace_on_class(r, c)
        assert got == pytest.approx(expect, rel=1e-10)
        assert got == pytest.approx(
            trace_on_class(ch1, c) + trace_on_class(ch2, c), rel=1e-10
        )


def test_conjugate_rep(classes_L6):
    r = character_rep(CharacterPoint((np.exp(1j * 0.9), 0.8 + 0.1j, 1, 1)))
    rc = conjugate_rep(r)
    for c in classes_L6[::17]:
        assert trace_on_class(rc, c) == pytest.approx(
            np.conj(trace_on_class(r, c)), abs=1e-12
        )
    # conjugate of a unitary character is its inverse character
    uni = character_rep(CharacterPoint((np.exp(1j * 0.9), 1, 1, 1)))
    inv = character_rep(CharacterPoint((np.exp(-1j * 0.9), 1, 1, 1)))
    for c in classes_L6[::29]:
        assert trace_on_class(conjugate_rep(uni), c) == pytest.approx(
            trace_on_class(inv, c), abs=1e-12
        )


def test_similar_rep(group, classes_L6, rng):
    r = from_generator_images(group.generators)
    same = similar_rep(r, np.eye(2))
    assert np.allclose(same.images, r.images)

    P = np.eye(2) + 0.3 * rng.normal(size=(2, 2))
    rs = similar_rep(r, P)
    for c in classes_L6[::19]:
        assert trace_on_class(rs, c) == pytest.approx(
            trace_on_class(r, c), rel=1e-10, abs=1e-10
        )

    with pytest.raises(SingularImage):
        similar_rep(r, np.array([[1.0, 0.0], [0.0, 1e-14]]))


def test_rep_from_json(classes_L6):
    obj = {"character": [[2.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]}
    r = rep_from_json(obj)
    assert r.dim == 1
    assert trace_on_class(r, replace(classes_L6[0], rep_word=(1,))) == 2.0

    eye_flat = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    obj2 = {"dim": 2, "images": [eye_flat] * 4, "tol": 1e-10}
    r2 = rep_from_json(obj2)
    assert r2.dim == 2 and r2.relator_residual == 0.0
