from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from archspace import D, SearchSpace, make_space, replay, transition
from archspace.backend import (
    compile,
    forward,
    is_homogeneous,
    metadata,
    param_count,
    random_inputs,
    with_zero_biases,
)
from archspace.core import Fragment
from archspace.errors import NotTerminal, ShapeMismatch
from archspace.modules import add, avg, concat, conv2d, dense, identity, relu, sigmoid
from archspace.serialization import dumps, log_from_json
from archspace.traversal import unassigned_independent

GOLDEN = json.loads((Path(__file__).parent / "golden" / "shapes.json").read_text())


def _single(build, shapes):
    s = SearchSpace()
    s.set_io(build(s))
    return compile(s, shapes)


def test_dense_shapes_and_params():
    cg = _single(lambda s: dense(s, 3), {"in": (1, 4)})
    assert cg.output_shapes == {"out": (1, 3)}
    assert param_count(cg) == 4 * 3 + 3
    w = cg.modules["Dense-1"].weights
    assert np.all(np.abs(w["W"]) <= 0.05) and np.all(np.abs(w["b"]) <= 0.05)
    x = np.arange(4.0).reshape(1, 4)
    np.testing.assert_allclose(forward(cg, {"in": x})["out"], x @ w["W"] + w["b"])


def test_elementwise_ops():
    x = np.array([[-1.5, 0.0, 2.0]])
    cg = _single(identity, {"in": (1, 3)})
    assert np.array_equal(forward(cg, {"in": x})["out"], x)
    cg = _single(relu, {"in": (1, 3)})
    assert forward(cg, {"in": x})["out"].tolist() == [[0.0, 0.0, 2.0]]
    cg = _single(sigmoid, {"in": (1, 3)})
    y = forward(cg, {"in": x})["out"]
    assert y[0, 1] == 0.5
    np.testing.assert_allclose(y, 1 / (1 + np.exp(-x)), rtol=1e-12)


def test_multi_input_ops():
    a, b = np.ones((1, 4)), np.full((1, 6), 2.0)
    s = SearchSpace()
    ins, outs = concat(s, 2)
    s.set_io(Fragment({"a": ins["in0"], "b": ins["in1"]}, outs))
    cg = compile(s, {"a": (1, 4), "b": (1, 6)})
    assert cg.output_shapes["out"] == (1, 10)
    assert forward(cg, {"a": a, "b": b})["out"].tolist() == [[1.0] * 4 + [2.0] * 6]
    with pytest.raises(ShapeMismatch):
        compile(s, {"a": (1, 4), "b": (2, 6)})

    for build, expect in [(add, 3.0), (avg, 1.5)]:
        s = SearchSpace()
        ins, outs = build(s, 2)
        s.set_io(Fragment({"a": ins["in0"], "b": ins["in1"]}, outs))
        cg = compile(s, {"a": (1, 4), "b": (1, 4)})
        assert forward(cg, {"a": np.ones((1, 4)), "b": np.full((1, 4), 2.0)})["out"].tolist() == [[expect] * 4]
        with pytest.raises(ShapeMismatch):
            compile(s, {"a": (1, 4), "b": (1, 6)})


def test_conv_same_padding_and_params():
    cg = _single(lambda s: conv2d(s, 64), {"in": (1, 32, 32, 3)})
    assert cg.output_shapes["out"] == (1, 32, 32, 64)
    assert param_count(cg) == 3 * 3 * 3 * 64 + 64 == 1792
    cg = _single(lambda s: conv2d(s, 8, kernel=3, stride=2), {"in": (2, 5, 7, 3)})
    assert cg.output_shapes["out"] == (2, 3, 4, 8)


def _naive_conv(x, W, b, stride):
    k = W.shape[0]
    n, h, w, c = x.shape
    oh, ow = -(-h // stride), -(-w // stride)
    pad_h = max((oh - 1) * stride + k - h, 0)
    pad_w = max((ow - 1) * stride + k - w, 0)
    top, left = pad_h // 2, pad_w // 2
    out = np.zeros((n, oh, ow, W.shape[3]))
    for bi in range(n):
        for i in range(oh):
            for j in range(ow):
                for f in range(W.shape[3]):
                    acc = b[f]
                    for di in range(k):
                        for dj in range(k):
                            r, q = i * stride + di - top, j * stride + dj - left
                            if 0 <= r < h and 0 <= q < w:
                                acc += float(np.dot(x[bi, r, q], W[di, dj, :, f]))
                    out[bi, i, j, f] = acc
    return out


@pytest.mark.parametrize("shape,kernel,stride", [((1, 4, 4, 3), 3, 1), ((2, 5, 6, 2), 3, 2), ((1, 6, 5, 1), 2, 2)])
def test_conv_matches_loop_oracle(shape, kernel, stride):
    cg = _single(lambda s: conv2d(s, 4, kernel=kernel, stride=stride), {"in": shape})
    x = random_inputs(cg, 3)["in"]
    w = cg.modules["Conv2D-1"].weights
    np.testing.assert_allclose(forward(cg, {"in": x})["out"], _naive_conv(x, w["W"], w["b"], stride), rtol=1e-12, atol=1e-14)


def test_dense_chain():
    s = SearchSpace()
    a_in, a_out = dense(s, 3)
    b_in, b_out = dense(s, 2)
    s.connect(a_out["out"], b_in["in"])
    s.set_io(Fragment(a_in, b_out))
    cg = compile(s, {"in": (5, 4)})
    assert param_count(cg) == (4 * 3 + 3) + (3 * 2 + 2) == 23
    assert cg.output_shapes == {"out": (5, 2)}


def test_non_terminal_rejected(fig6):
    with pytest.raises(NotTerminal):
        compile(fig6, {"in": (1, 4, 4, 3)})


def test_shape_mismatch_names_module():
    s = SearchSpace()
    c_in, c_out = conv2d(s, 8)
    d_in, d_out = dense(s, 3)
    r_in, r_out = relu(s)
    s.connect(d_out["out"], r_in["in"])
    s.connect(r_out["out"], c_in["in"])
    s.set_io(Fragment(d_in, c_out))
    with pytest.raises(ShapeMismatch) as e:
        compile(s, {"in": (2, 4)})
    assert e.value.module_id == "Conv2D-1" and "Conv2D-1" in str(e.value)


def _terminal_fig6():
    s = make_space("fig6_example")
    transition(s, "IH-3", 2)
    transition(s, "IH-2", 1)
    while unassigned_independent(s):
        h = unassigned_independent(s)[0]
        transition(s, h, s.hyperps[h].domain[-1])
    return s


def test_each_module_compiled_once_and_traced_in_order():
    s = _terminal_fig6()
    cg = compile(s, {"in": (1, 4, 4, 3)})
    assert cg.compile_counts == {m: 1 for m in s.modules}
    trace: list = []
    forward(cg, random_inputs(cg, 0), trace)
    assert trace == cg.seq and sorted(trace) == sorted(s.modules)
    pos = {m: k for k, m in enumerate(trace)}
    for o, i in s.edges:
        assert pos[o.module] < pos[i.module]


def test_forward_is_deterministic():
    a = compile(_terminal_fig6(), {"in": (1, 4, 4, 3)}, seed=7)
    b = compile(_terminal_fig6(), {"in": (1, 4, 4, 3)}, seed=7)
    x = random_inputs(a, 1)
    assert np.array_equal(forward(a, x)["out"], forward(b, x)["out"])
    c = compile(_terminal_fig6(), {"in": (1, 4, 4, 3)}, seed=8)
    assert not np.array_equal(forward(a, x)["out"], forward(c, x)["out"])


def test_homogeneity_with_zero_biases():
    cg = with_zero_biases(compile(_terminal_fig6(), {"in": (1, 4, 4, 3)}))
    assert is_homogeneous(cg)
    x = random_inputs(cg, 2)["in"]
    y = forward(cg, {"in": x})["out"]
    np.testing.assert_allclose(forward(cg, {"in": 2.5 * x})["out"], 2.5 * y, rtol=1e-9)
    assert not is_homogeneous(_single(sigmoid, {"in": (1, 2)}))


def test_input_shape_checked_at_forward():
    cg = _single(identity, {"in": (1, 3)})
    with pytest.raises(ShapeMismatch):
        forward(cg, {"in": np.zeros((1, 4))})
    with pytest.raises(ShapeMismatch):
        forward(cg, {})


def test_metadata_is_json_ready():
    cg = compile(_terminal_fig6(), {"in": (1, 4, 4, 3)})
    meta = metadata(cg)
    assert json.loads(dumps(meta)) == meta
    assert meta["param_count"] == param_count(cg) and meta["seq"] == cg.seq


@pytest.mark.parametrize("entry", GOLDEN["entries"], ids=lambda e: f"{e['space']}-{e['index']}")
def test_golden_shapes(entry):
    s = replay(make_space(entry["space"]), log_from_json(entry["log"]))
    cg = compile(s, {k: tuple(v) for k, v in entry["input_shapes"].items()})
    got = {m: list(cm.output_shapes[0]) for m, cm in cg.modules.items()}
    assert got == entry["modules"]
    assert {k: list(v) for k, v in cg.output_shapes.items()} == entry["outputs"]


def test_dense_units_hyperparameter_feeds_shape():
    s = SearchSpace()
    s.set_io(dense(s, D([5, 7])))
    transition(s, "IH-1", 7)
    assert compile(s, {"in": (2, 3)}).output_shapes["out"] == (2, 7)
