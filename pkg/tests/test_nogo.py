import json
import math

import numpy as np
import pytest

from diffusion_nogo.errors import PreconditionError, ShapeError
from diffusion_nogo.nogo import (
    inner_product_distortion,
    linear_extension_contradiction,
    search_max_distortion,
)
from diffusion_nogo.statevector import StateVector, qubit_layout

R = 1 / math.sqrt(2)


def independent_distortion(rec: dict) -> float:
    """Recompute a witness from its JSON record with nothing but numpy."""
    vec = lambda key: np.array([complex(re, im) for re, im in rec[key]])
    p1, p2, f = vec("psi1"), vec("psi2"), vec("phi")
    r1 = f - 2 * np.vdot(p1, f) * p1
    r2 = f - 2 * np.vdot(p2, f) * p2
    ip = np.vdot(p1, p2)
    return abs(ip * np.vdot(f, f) - ip * np.vdot(r1, r2))


class TestDistortion:
    def test_identical_inputs(self, rng):
        lay = qubit_layout()
        p, f = StateVector.random(lay, rng), StateVector.random(lay, rng)
        assert inner_product_distortion(p, p, f).distortion < 1e-15

    def test_zero_plus_example(self):
        w = inner_product_distortion([1, 0], [R, R], [1, 0])
        assert abs(w.input_overlap - R) < 1e-15
        assert abs(w.output_overlap) < 1e-15
        assert abs(w.distortion - 0.7071067811865476) < 1e-15

    def test_statevector_and_raw_agree(self):
        q = qubit_layout()
        sv = inner_product_distortion(StateVector.basis(q, 0),
                                      StateVector.from_amplitudes(q, [R, R]),
                                      StateVector.basis(q, 0))
        raw = inner_product_distortion([1, 0], [R, R], [1, 0])
        assert abs(sv.distortion - raw.distortion) < 1e-15

    def test_orthogonal_pair(self):
        w = inner_product_distortion([1, 0], [0, 1], [R, R])
        assert w.input_overlap == 0 and w.output_overlap == 0 and w.distortion == 0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            inner_product_distortion([1, 0], [1, 0, 0], [1, 0])

    def test_unnormalized(self):
        with pytest.raises(PreconditionError):
            inner_product_distortion([1, 1], [1, 0], [1, 0])


class TestSearch:
    def test_dim2_strong(self):
        assert search_max_distortion(2, 1000, np.random.default_rng(0)).distortion >= 0.5

    def test_single_trial_is_valid(self):
        w = search_max_distortion(2, 1, np.random.default_rng(3))
        assert 0 <= w.distortion <= 2
        assert abs(independent_distortion(w.to_json()) - w.distortion) < 1e-12

    def test_monotone_in_trials(self):
        vals = [search_max_distortion(3, t, np.random.default_rng(9)).distortion for t in (1, 10, 100, 400)]
        assert vals == sorted(vals)

    def test_reproducible(self):
        a = search_max_distortion(4, 50, np.random.default_rng(1))
        b = search_max_distortion(4, 50, np.random.default_rng(1))
        assert a.to_json() == b.to_json()

    @pytest.mark.parametrize("dim, trials", [(1, 10), (2, 0)])
    def test_validation(self, dim, trials):
        with pytest.raises(PreconditionError):
            search_max_distortion(dim, trials, np.random.default_rng(0))

    def test_json_reverifies(self):
        w = search_max_distortion(8, 200, np.random.default_rng(5))
        rec = json.loads(json.dumps(w.to_json()))
        assert abs(independent_distortion(rec) - w.distortion) < 1e-12


class TestLinearExtension:
    def test_dim2_explicit(self):
        # linear map: (e0+e1)/sqrt2 (x) e0 -> (-e0(x)e0 + e1(x)e0)/sqrt2
        # required:   (e0+e1)/sqrt2 (x) (-e1)
        # the two outputs are orthogonal unit vectors, so the gap is sqrt(2)
        rep = linear_extension_contradiction(2)
        lin = np.array([-R, 0, R, 0])
        req = np.array([0, -R, 0, -R])
        assert np.allclose(rep.linear_output, lin, atol=1e-15)
        assert np.allclose(rep.required_output, req, atol=1e-15)
        assert abs(rep.deviation - math.sqrt(2)) < 1e-12
        assert rep.deviation > 0.9

    def test_training_pairs_follow_definition(self):
        rep = linear_extension_contradiction(3)
        for inp, out in rep.training_pairs:
            i, j = divmod(int(np.argmax(np.abs(inp))), 3)
            sign = -1 if i == j else 1
            assert np.allclose(out, sign * inp)

    def test_dim3(self):
        assert linear_extension_contradiction(3).deviation > 1e-6

    @pytest.mark.parametrize("dim", [2, 3, 4, 8])
    def test_positive(self, dim):
        assert linear_extension_contradiction(dim).deviation > 1e-6

    def test_global_phase_invariance(self):
        rep = linear_extension_contradiction(2)
        phase = np.exp(0.7j)
        assert abs(np.linalg.norm(phase * rep.linear_output - phase * rep.required_output)
                   - rep.deviation) < 1e-15

    def test_json_reverifies(self):
        rec = linear_extension_contradiction(4).to_json()
        d = rec["dim"]
        linear = np.zeros((d * d, d * d), dtype=complex)
        for i, j, sign in rec["training_pairs"]:
            linear[i * d + j, i * d + j] = sign
        test = np.array([complex(*z) for z in rec["test_input"]])
        required = np.array([complex(*z) for z in rec["required_output"]])
        assert abs(np.linalg.norm(linear @ test - required) - rec["deviation"]) < 1e-12
