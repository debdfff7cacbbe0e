"""Problem instances and their canonical JSON encoding.

Four instance types are understood:

``mcst``          laminar-family degree bounds on a spanning tree problem
``general-mcst``  arbitrary edge-set bounds (produced by generators, only
                  consumed by brute-force verifiers)
``intersection``  two supermodular covering functions with upper bounds
``lattice``       lattice covering constraints with lower/upper bounds

Rationals are encoded as "p/q" strings, never floats.  The encoder is
canonical (sorted keys, lowest-terms rationals, fixed list orders) so
identical instances serialize byte-identically.
"""

import hashlib
import json
from dataclasses import dataclass

from .errors import InstanceError
from .graphs import Edge, Graph, iter_bits, mask_of
from .laminar import LaminarForest
from .oracles import (
    ContraPolymatroidPair,
    CrossingConstraint,
    LatticeOracle,
    MatroidOracle,
    matroid_to_lattice,
    max_frequency,
)
from .rational import Rat, is_integral, parse_rat, render_rat

SCHEMA_VERSION = 1

GENERAL = "general"
INCLUSION = "inclusion"


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def digest_of(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _ids(mask):
    return sorted(iter_bits(mask))


@dataclass(frozen=True)
class McstInstance:
    graph: Graph
    family: tuple  # ((vertex_mask, integral bound), ...) in file order

    def __post_init__(self):
        limit = 2 * self.graph.n - 1
        if len(self.family) > limit:
            raise InstanceError(
                f"laminar family has {len(self.family)} sets, limit is {limit}"
            )
        for vmask, bound in self.family:
            if not is_integral(bound) or bound < 0:
                raise InstanceError("initial degree bounds must be non-negative integers")
            if vmask <= 0 or vmask > self.graph.full_vmask:
                raise InstanceError("family set out of vertex range")
        LaminarForest.from_sets(self.family)  # validates laminarity

    def build_forest(self):
        return LaminarForest.from_sets(self.family)

    def to_json(self):
        return {
            "schema": SCHEMA_VERSION,
            "type": "mcst",
            "n": self.graph.n,
            "edges": [
                {"id": e.id, "u": e.u, "v": e.v, "cost": render_rat(e.cost)}
                for e in self.graph.edges
            ],
            "family": [
                {"vertices": _ids(vmask), "bound": render_rat(b)}
                for vmask, b in self.family
            ],
        }


@dataclass(frozen=True)
class GeneralMcstInstance:
    """Spanning tree with bounds on arbitrary edge sets; brute-force only."""

    graph: Graph
    bounds: tuple  # ((edge_mask, bound), ...)

    def to_json(self):
        return {
            "schema": SCHEMA_VERSION,
            "type": "general-mcst",
            "n": self.graph.n,
            "edges": [
                {"id": e.id, "u": e.u, "v": e.v, "cost": render_rat(e.cost)}
                for e in self.graph.edges
            ],
            "bounds": [
                {"edges": _ids(emask), "bound": render_rat(b)}
                for emask, b in self.bounds
            ],
        }


@dataclass(frozen=True)
class IntersectionInstance:
    pair: ContraPolymatroidPair
    costs: tuple
    constraints: tuple  # CrossingConstraint, upper bounds only

    def __post_init__(self):
        if len(self.costs) != self.pair.n:
            raise InstanceError("cost vector length mismatch")
        if any(c < 0 for c in self.costs):
            raise InstanceError("costs must be non-negative")
        for con in self.constraints:
            if con.lower is not None:
                raise InstanceError("intersection instances take upper bounds only")
            if not is_integral(con.upper) or con.upper < 0:
                raise InstanceError("degree bounds must be non-negative integers")
            if con.elems == 0:
                raise InstanceError("degree bound on an empty element set")

    @property
    def n(self):
        return self.pair.n

    @property
    def delta(self):
        return max_frequency(self.constraints, self.pair.n)

    def to_json(self):
        return {
            "schema": SCHEMA_VERSION,
            "type": "intersection",
            "ground": self.pair.n,
            "cost": [render_rat(c) for c in self.costs],
            "r1": list(self.pair.r1),
            "r2": list(self.pair.r2),
            "bounds": [
                {"elements": _ids(c.elems), "upper": render_rat(c.upper)}
                for c in self.constraints
            ],
        }


@dataclass(frozen=True)
class LatticeInstance:
    lat: LatticeOracle
    costs: tuple
    constraints: tuple  # CrossingConstraint; lower may be None
    variant: str = GENERAL
    matroid_rank: tuple = None  # set when built from a matroid rank table

    def __post_init__(self):
        if self.variant not in (GENERAL, INCLUSION):
            raise InstanceError(f"unknown variant {self.variant!r}")
        if len(self.costs) != self.lat.ground_n:
            raise InstanceError("cost vector length mismatch")
        if any(c < 0 for c in self.costs):
            raise InstanceError("costs must be non-negative")
        for con in self.constraints:
            if not is_integral(con.upper):
                raise InstanceError("degree bounds must be integers")
            if con.lower is not None and not is_integral(con.lower):
                raise InstanceError("degree bounds must be integers")
            if con.elems == 0:
                raise InstanceError("degree bound on an empty element set")
        if self.variant == INCLUSION:
            for con in self.constraints:
                if con.lower is not None:
                    raise InstanceError(
                        "inclusion variant admits upper bounds only"
                    )
            lat = self.lat
            for i in range(lat.size):
                for j in range(lat.size):
                    if lat.leq(i, j) != (lat.rho[i] & lat.rho[j] == lat.rho[i]):
                        raise InstanceError(
                            "inclusion variant requires the order to be "
                            f"image inclusion; members ({i},{j}) disagree"
                        )

    @property
    def n(self):
        return self.lat.ground_n

    @property
    def delta(self):
        return max_frequency(self.constraints, self.lat.ground_n)

    def to_json(self):
        body = {
            "schema": SCHEMA_VERSION,
            "type": "lattice",
            "ground": self.lat.ground_n,
            "variant": self.variant,
            "cost": [render_rat(c) for c in self.costs],
            "bounds": [
                {
                    "elements": _ids(c.elems),
                    "lower": None if c.lower is None else render_rat(c.lower),
                    "upper": render_rat(c.upper),
                }
                for c in self.constraints
            ],
        }
        if self.matroid_rank is not None:
            body["matroid_rank"] = list(self.matroid_rank)
        else:
            lat = self.lat
            body["lattice"] = {
                "members": [
                    {"rho": _ids(lat.rho[i]), "rank": lat.rank[i]}
                    for i in range(lat.size)
                ],
                "leq": [
                    [1 if lat.leq(i, j) else 0 for j in range(lat.size)]
                    for i in range(lat.size)
                ],
                "meet": [list(row) for row in lat.meet],
                "join": [list(row) for row in lat.join],
            }
        return body


def from_matroid(matroid, costs, constraints, variant=GENERAL):
    return LatticeInstance(
        lat=matroid_to_lattice(matroid),
        costs=tuple(Rat(c) for c in costs),
        constraints=tuple(constraints),
        variant=variant,
        matroid_rank=tuple(matroid.rank),
    )


# -- decoding ---------------------------------------------------------------


def _decode_graph(body):
    edges = [
        Edge(e["id"], e["u"], e["v"], parse_rat(e["cost"])) for e in body["edges"]
    ]
    return Graph(body["n"], edges)


def decode_instance(body):
    if not isinstance(body, dict):
        raise InstanceError("instance must be a JSON object")
    if body.get("schema") != SCHEMA_VERSION:
        raise InstanceError(f"unsupported schema {body.get('schema')!r}")
    kind = body.get("type")
    try:
        if kind == "mcst":
            family = tuple(
                (mask_of(s["vertices"]), parse_rat(s["bound"]))
                for s in body["family"]
            )
            return McstInstance(_decode_graph(body), family)
        if kind == "general-mcst":
            bounds = tuple(
                (mask_of(s["edges"]), parse_rat(s["bound"])) for s in body["bounds"]
            )
            return GeneralMcstInstance(_decode_graph(body), bounds)
        if kind == "intersection":
            pair = ContraPolymatroidPair(
                body["ground"], tuple(body["r1"]), tuple(body["r2"])
            )
            cons = tuple(
                CrossingConstraint(mask_of(b["elements"]), None, parse_rat(b["upper"]))
                for b in body["bounds"]
            )
            return IntersectionInstance(
                pair, tuple(parse_rat(c) for c in body["cost"]), cons
            )
        if kind == "lattice":
            cons = tuple(
                CrossingConstraint(
                    mask_of(b["elements"]),
                    None if b.get("lower") is None else parse_rat(b["lower"]),
                    parse_rat(b["upper"]),
                )
                for b in body["bounds"]
            )
            costs = tuple(parse_rat(c) for c in body["cost"])
            if "matroid_rank" in body:
                matroid = MatroidOracle(body["ground"], tuple(body["matroid_rank"]))
                return from_matroid(matroid, costs, cons, body["variant"])
            tables = body["lattice"]
            lat = LatticeOracle(
                body["ground"],
                rho=[mask_of(m["rho"]) for m in tables["members"]],
                rank=[m["rank"] for m in tables["members"]],
                leq=tables["leq"],
                meet=tables["meet"],
                join=tables["join"],
            )
            return LatticeInstance(lat, costs, cons, body["variant"])
    except KeyError as exc:
        raise InstanceError(f"missing instance field {exc}") from exc
    raise InstanceError(f"unknown instance type {kind!r}")


def load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            body = json.load(fh)
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON in {path}: {exc}") from exc
    return decode_instance(body)


def dump_instance(instance, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(instance.to_json()))


def instance_digest(instance):
    return digest_of(instance.to_json())
