"""JSON encoding of search spaces and assignment logs.

The encoding is deterministic (sorted keys, compact separators), so two spaces
with equal state serialize to identical bytes. :func:`canonical` additionally
renames every module and hyperparameter by traversal order and drops the
naming scope, so isomorphic spaces that were reached along different
assignment orders compare equal.
"""

from __future__ import annotations

import json

from .core import Hyperparameter, Input, Module, Output, Scope, SearchSpace
from .errors import SerializationError
from .registry import Call, D, decode_param, encode_param, map_refs, normalize_scalar
from .traversal import ordered_hyperps, ordered_modules

FORMAT_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _call_to_dict(call: Call) -> dict:
    return {"fn": call.fn, "params": encode_param(call.params)}


def space_to_dict(space: SearchSpace, include_scope: bool = True) -> dict:
    modules = []
    for mid in sorted(space.modules):
        m = space.modules[mid]
        d = {
            "id": m.id,
            "type": m.type_name,
            "inputs": list(m.inputs),
            "outputs": list(m.outputs),
            "hyperps": dict(m.hyperps),
        }
        if m.is_basic:
            d["kind"] = "basic"
            d["compile_spec"] = m.op
            d["config"] = dict(m.config)
        else:
            d["kind"] = "substitution"
            d["generator"] = _call_to_dict(m.generator)
        modules.append(d)
    hyperps = []
    for h in sorted(space.hyperps):
        hp = space.hyperps[h]
        d = {"id": h}
        if hp.is_independent:
            d["domain"] = list(hp.domain)
        else:
            d["parents"] = dict(hp.parents)
            d["fn"] = _call_to_dict(hp.fn)
        if h in space.values:
            d["value"] = space.values[h]
        hyperps.append(d)
    out = {
        "version": FORMAT_VERSION,
        "modules": modules,
        "hyperparameters": hyperps,
        "edges": [[o.module, o.name, i.module, i.name] for o, i in space.edges],
        "inputs": {k: [p.module, p.name] for k, p in space.inputs.items()},
        "outputs": {k: [p.module, p.name] for k, p in space.outputs.items()},
    }
    if include_scope:
        out["scope"] = dict(space.scope.counters)
    return out


def serialize(space: SearchSpace) -> str:
    return dumps(space_to_dict(space))


# decoding with path-carrying errors

def _expect(x, kind, path):
    if not isinstance(x, kind) or (kind is int and isinstance(x, bool)):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SerializationError(path, f"expected {name}, got {type(x).__name__}")
    return x


def _field(d, key, kind, path):
    _expect(d, dict, path)
    if key not in d:
        raise SerializationError(path, f"missing key {key!r}")
    return _expect(d[key], kind, f"{path}.{key}")


def _str_list(x, path):
    for k, v in enumerate(_expect(x, list, path)):
        _expect(v, str, f"{path}[{k}]")
    return tuple(x)


def _str_map(x, path):
    for k, v in _expect(x, dict, path).items():
        _expect(v, str, f"{path}.{k}")
    return dict(x)


def _scalar(x, path):
    try:
        return normalize_scalar(x)
    except TypeError as e:
        raise SerializationError(path, str(e)) from None


def _call(x, path):
    fn = _field(x, "fn", str, path)
    params = _field(x, "params", dict, path)
    try:
        return Call(fn, decode_param(params))
    except Exception as e:
        raise SerializationError(f"{path}.params", str(e)) from None


def space_from_dict(d) -> SearchSpace:
    _expect(d, dict, "$")
    version = d.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise SerializationError("$.version", f"unsupported format version {version!r}")
    space = SearchSpace()
    for k, md in enumerate(_field(d, "modules", list, "$")):
        p = f"$.modules[{k}]"
        mid = _field(md, "id", str, p)
        if mid in space.modules:
            raise SerializationError(f"{p}.id", f"duplicate module id {mid!r}")
        kw = {}
        kind = _field(md, "kind", str, p)
        if kind == "substitution":
            kw["generator"] = _call(_field(md, "generator", dict, p), f"{p}.generator")
        elif kind == "basic":
            kw["op"] = _field(md, "compile_spec", str, p)
            kw["config"] = {
                name: _scalar(v, f"{p}.config.{name}") for name, v in _field(md, "config", dict, p).items()
            }
        else:
            raise SerializationError(f"{p}.kind", f"expected 'basic' or 'substitution', got {kind!r}")
        space.modules[mid] = Module(
            mid,
            _field(md, "type", str, p),
            _str_list(_field(md, "inputs", list, p), f"{p}.inputs"),
            _str_list(_field(md, "outputs", list, p), f"{p}.outputs"),
            _str_map(_field(md, "hyperps", dict, p), f"{p}.hyperps"),
            **kw,
        )
    for k, hd in enumerate(_field(d, "hyperparameters", list, "$")):
        p = f"$.hyperparameters[{k}]"
        h = _field(hd, "id", str, p)
        if h in space.hyperps:
            raise SerializationError(f"{p}.id", f"duplicate hyperparameter id {h!r}")
        if "domain" in hd:
            dom = _field(hd, "domain", list, p)
            try:
                values = D([_scalar(v, f"{p}.domain[{j}]") for j, v in enumerate(dom)]).values
            except SerializationError:
                raise
            except Exception as e:
                raise SerializationError(f"{p}.domain", str(e)) from None
            space.hyperps[h] = Hyperparameter(h, domain=values)
        else:
            parents = _str_map(_field(hd, "parents", dict, p), f"{p}.parents")
            space.hyperps[h] = Hyperparameter(h, parents=parents, fn=_call(_field(hd, "fn", dict, p), f"{p}.fn"))
        if "value" in hd:
            space.values[h] = _scalar(hd["value"], f"{p}.value")
    for k, e in enumerate(_field(d, "edges", list, "$")):
        p = f"$.edges[{k}]"
        if len(_expect(e, list, p)) != 4:
            raise SerializationError(p, "an edge is [out_module, out_port, in_module, in_port]")
        om, on, im, iname = (_expect(v, str, f"{p}[{j}]") for j, v in enumerate(e))
        space.incoming[Input(im, iname)] = Output(om, on)
    for key, cls in (("inputs", Input), ("outputs", Output)):
        ports = {}
        for name, v in _field(d, key, dict, "$").items():
            p = f"$.{key}.{name}"
            if len(_expect(v, list, p)) != 2:
                raise SerializationError(p, "a port is [module, port]")
            ports[name] = cls(*(_expect(x, str, f"{p}[{j}]") for j, x in enumerate(v)))
        setattr(space, key, ports)
    scope = d.get("scope", {})
    space.scope = Scope({k: _expect(v, int, f"$.scope.{k}") for k, v in _expect(scope, dict, "$.scope").items()})
    return space


def deserialize(text: str) -> SearchSpace:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return space_from_dict(d)


# canonical form

def _rename(old_ids, kind_of):
    mapping, counters = {}, {}
    for old in old_ids:
        prefix = kind_of(old)
        counters[prefix] = counters.get(prefix, 0) + 1
        mapping[old] = f"{prefix}-{counters[prefix]}"
    return mapping


def canonical_dict(space: SearchSpace) -> dict:
    """Encoding with ids renamed by traversal order (scope omitted)."""
    mod_order = ordered_modules(space) if space.outputs else []
    mod_order += sorted(set(space.modules) - set(mod_order))
    hp_order = ordered_hyperps(space) if space.outputs else []
    hp_order += sorted(set(space.hyperps) - set(hp_order))
    mmap = _rename(mod_order, lambda m: space.modules[m].type_name)
    hmap = _rename(hp_order, lambda h: "IH" if space.hyperps[h].is_independent else "DH")

    other = SearchSpace()
    for m in space.modules.values():
        gen = m.generator
        if gen is not None:
            gen = Call(gen.fn, map_refs(gen.params, lambda h: hmap.get(h, h)))
        other.modules[mmap[m.id]] = Module(
            mmap[m.id],
            m.type_name,
            m.inputs,
            m.outputs,
            {k: hmap[h] for k, h in m.hyperps.items()},
            m.op,
            m.config,
            gen,
        )
    for hp in space.hyperps.values():
        new = hmap[hp.id]
        if hp.is_independent:
            other.hyperps[new] = Hyperparameter(new, domain=hp.domain)
        else:
            other.hyperps[new] = Hyperparameter(
                new, parents={k: hmap[p] for k, p in hp.parents.items()}, fn=hp.fn
            )
    other.values = {hmap[h]: v for h, v in space.values.items()}
    other.incoming = {
        Input(mmap[i.module], i.name): Output(mmap[o.module], o.name) for i, o in space.incoming.items()
    }
    other.inputs = {k: Input(mmap[p.module], p.name) for k, p in space.inputs.items()}
    other.outputs = {k: Output(mmap[p.module], p.name) for k, p in space.outputs.items()}
    return space_to_dict(other, include_scope=False)


def canonical(space: SearchSpace) -> str:
    return dumps(canonical_dict(space))


# assignment logs

def log_to_json(log) -> list:
    return [{"hyperp_id": h, "value": v} for h, v in log]


def log_from_json(x, path="$") -> list:
    out = []
    for k, item in enumerate(_expect(x, list, path)):
        p = f"{path}[{k}]"
        h = _field(item, "hyperp_id", str, p)
        if "value" not in item:
            raise SerializationError(p, "missing key 'value'")
        out.append((h, _scalar(item["value"], f"{p}.value")))
    return out


def dumps_log(log) -> str:
    return dumps(log_to_json(log))


def loads_log(text: str) -> list:
    try:
        x = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError("$", f"invalid JSON: {e.msg}") from None
    return log_from_json(x)
