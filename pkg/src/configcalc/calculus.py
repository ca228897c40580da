"""Local functions, exact-support expansions, and the naive differential.

A ``LocalFunction`` is an exact-rational function of finitely many sites: a
sorted support plus a dense mixed-radix table of values.  Everything here is
Fraction arithmetic; nothing is ever rounded.

The differential of a function along a directed edge e is
``f(eta^e) - f(eta)`` where ``eta^e`` applies the interaction across e.  A
``Form`` assigns one local function per directed window edge; closedness and
integration are decided exactly by scanning the finite configuration graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .configspace import (apply_edge, digit_powers, guard_budget, index_of)
from .interactions import Interaction
from .locales import Locale, Window
from .serialize import InputError, fraction_from_str, fraction_to_str

ZERO = Fraction(0)


@dataclass(frozen=True)
class LocalFunction:
  """Exact function of the states at finitely many sites.

  ``values`` holds one Fraction per assignment of states to ``support``, the
  first support vertex being the most significant mixed-radix digit.  The
  empty support encodes a constant.
  """

  support: tuple
  n_states: int
  base: int
  values: tuple

  def __post_init__(self):
    expected = self.n_states ** len(self.support)
    if len(self.values) != expected:
      raise InputError(
          f"value table has {len(self.values)} entries, expected {expected}")

  # -- evaluation -----------------------------------------------------------

  def powers(self):
    return digit_powers(len(self.support), self.n_states)

  def value_at(self, assignment: dict) -> Fraction:
    """Evaluate at {vertex: state_index}; absent sites sit at the base."""
    idx = 0
    for v, p in zip(self.support, self.powers()):
      idx += assignment.get(v, self.base) * p
    return self.values[idx]

  def compile_for(self, window: Window):
    """A fast evaluator digits -> Fraction for dense window configurations."""
    pos = tuple(window.position(v) for v in self.support)
    pows = self.powers()
    values = self.values
    def ev(digits):
      idx = 0
      for p, w in zip(pos, pows):
        idx += digits[p] * w
      return values[idx]
    return ev

  def is_zero(self) -> bool:
    return all(v == 0 for v in self.values)

  def assignments(self):
    """Iterate (digits, value) over the support table."""
    return zip(product(range(self.n_states), repeat=len(self.support)),
               self.values)


def constant(value, n_states: int, base: int) -> LocalFunction:
  return LocalFunction((), n_states, base, (Fraction(value),))


def from_callable(support, n_states: int, base: int, fn) -> LocalFunction:
  support = tuple(sorted(support))
  vals = tuple(Fraction(fn(digits))
               for digits in product(range(n_states), repeat=len(support)))
  return LocalFunction(support, n_states, base, vals)


def embed(f: LocalFunction, support) -> LocalFunction:
  """The same function viewed on a larger support."""
  support = tuple(sorted(support))
  if support == f.support:
    return f
  missing = [v for v in f.support if v not in support]
  if missing:
    raise InputError(f"embed target lacks support sites {missing}")
  pos = {v: i for i, v in enumerate(support)}
  fpos = tuple(pos[v] for v in f.support)
  fpows = f.powers()
  vals = []
  for digits in product(range(f.n_states), repeat=len(support)):
    vals.append(f.values[sum(digits[p] * w for p, w in zip(fpos, fpows))])
  return LocalFunction(support, f.n_states, f.base, tuple(vals))


def trim(f: LocalFunction) -> LocalFunction:
  """Drop support sites the table does not actually depend on."""
  n = len(f.support)
  if n == 0:
    return f
  s = f.n_states
  pows = f.powers()
  keep = []
  for k in range(n):
    depends = False
    block = pows[k]
    for idx, v in enumerate(f.values):
      d = (idx // block) % s
      if d != 0 and v != f.values[idx - d * block]:
        depends = True
        break
    if depends:
      keep.append(k)
  if len(keep) == n:
    return f
  new_support = tuple(f.support[k] for k in keep)
  vals = []
  for digits in product(range(s), repeat=len(keep)):
    full = [0] * n
    for k, d in zip(keep, digits):
      full[k] = d
    vals.append(f.values[index_of(full, pows)])
  return LocalFunction(new_support, s, f.base, tuple(vals))


def _binary(f: LocalFunction, g: LocalFunction, op) -> LocalFunction:
  if f.n_states != g.n_states or f.base != g.base:
    raise InputError("mixing local functions over different state alphabets")
  support = tuple(sorted(set(f.support) | set(g.support)))
  fe, ge = embed(f, support), embed(g, support)
  return LocalFunction(support, f.n_states, f.base,
                       tuple(op(a, b) for a, b in zip(fe.values, ge.values)))


def add(f, g):
  return _binary(f, g, lambda a, b: a + b)


def sub(f, g):
  return _binary(f, g, lambda a, b: a - b)


def scale(f: LocalFunction, c) -> LocalFunction:
  c = Fraction(c)
  return LocalFunction(f.support, f.n_states, f.base,
                       tuple(c * v for v in f.values))


def functions_equal(f: LocalFunction, g: LocalFunction) -> bool:
  return sub(f, g).is_zero()


def restrict(f: LocalFunction, region) -> LocalFunction:
  """iota^Region: evaluate with every site outside the region at the base."""
  region = set(region)
  support = tuple(v for v in f.support if v in region)
  pos = {v: i for i, v in enumerate(support)}
  fpows = f.powers()
  vals = []
  for digits in product(range(f.n_states), repeat=len(support)):
    idx = 0
    for v, w in zip(f.support, fpows):
      idx += (digits[pos[v]] if v in pos else f.base) * w
    vals.append(f.values[idx])
  return LocalFunction(support, f.n_states, f.base, tuple(vals))


# ---------------------------------------------------------------------------
# Exact-support expansion


def expansion(f: LocalFunction, budget: int = 1 << 22) -> dict:
  """Exact-support pieces f_L over the subsets L of the support.

  Inclusion-exclusion in closed form: f_L(eta) is the alternating sum of
  f(eta restricted to L') over L' inside L.  Pieces that vanish identically
  are dropped; the empty piece is f at the all-base configuration.  Summing
  all pieces over subsets of any region recovers iota^Region f.
  """
  n = len(f.support)
  if (2 ** n) * (f.n_states ** n) > budget:
    raise InputError(f"expansion over {n} sites exceeds the budget")
  pieces = {}
  for size in range(n + 1):
    for sub_support in combinations(f.support, size):
      piece_vals = []
      sub_set = set(sub_support)
      for digits in product(range(f.n_states), repeat=size):
        assignment = dict(zip(sub_support, digits))
        total = ZERO
        for inner_size in range(size + 1):
          for inner in combinations(sub_support, inner_size):
            sign = 1 if (size - inner_size) % 2 == 0 else -1
            val = f.value_at({v: assignment[v] for v in inner})
            total += sign * val
        piece_vals.append(total)
      piece = LocalFunction(sub_support, f.n_states, f.base, tuple(piece_vals))
      if not piece.is_zero():
        pieces[sub_support] = piece
  return pieces


def reassemble(pieces: dict, region, n_states: int, base: int) -> LocalFunction:
  """Sum of the pieces supported inside the region (= iota^Region of the whole)."""
  region = set(region)
  total = constant(0, n_states, base)
  for supp, piece in pieces.items():
    if set(supp) <= region:
      total = add(total, piece)
  return total


def support_diameter(vertices, locale: Locale) -> int:
  verts = tuple(vertices)
  best = 0
  for i in range(len(verts)):
    for j in range(i + 1, len(verts)):
      best = max(best, locale.distance(verts[i], verts[j]))
  return best


def exact_support_radius(f: LocalFunction, locale: Locale) -> int:
  """Largest diameter among the exact-support pieces of f."""
  return max((support_diameter(supp, locale) for supp in expansion(f)),
             default=0)


def is_uniform(f: LocalFunction, locale: Locale, radius: int) -> dict:
  pieces = expansion(f)
  offenders = [list(map(locale.encode_vertex, supp))
               for supp in pieces
               if support_diameter(supp, locale) > radius]
  return {"uniform": not offenders, "radius": radius, "offenders": offenders}


def uniformity_criterion(f: LocalFunction, locale: Locale, region, x,
                         radius: int) -> bool:
  """Ball-local test for membership of x-dependence inside radius R.

  Removing x from the region changes iota^Region f exactly as it changes the
  restriction to the R-ball around x (punctured vs. full), whenever f is
  uniform at scale R.
  """
  region = set(region)
  if x not in region:
    raise InputError(f"{x!r} is not in the probed region")
  ball = set(locale.ball(x, radius))
  lhs = sub(restrict(f, region), restrict(f, region - {x}))
  rhs = sub(restrict(f, region & ball), restrict(f, (region & ball) - {x}))
  return sub(lhs, rhs).is_zero()


# ---------------------------------------------------------------------------
# Forms


@dataclass(frozen=True)
class Form:
  """One local function per directed window edge (missing edges are zero)."""

  n_states: int
  base: int
  fns: dict = field(default_factory=dict)
  radius: int | None = None

  def fn(self, edge) -> LocalFunction | None:
    return self.fns.get(edge)

  def edges(self):
    return sorted(self.fns)

  def compile_for(self, window: Window) -> dict:
    return {e: f.compile_for(window) for e, f in self.fns.items()}


def form_add(a: Form, b: Form, radius=None) -> Form:
  fns = dict(a.fns)
  for e, f in b.fns.items():
    fns[e] = add(fns[e], f) if e in fns else f
  fns = {e: trim(f) for e, f in fns.items()}
  fns = {e: f for e, f in fns.items() if not f.is_zero()}
  return Form(a.n_states, a.base, fns, radius)


def form_scale(a: Form, c) -> Form:
  c = Fraction(c)
  if c == 0:
    return Form(a.n_states, a.base, {}, a.radius)
  return Form(a.n_states, a.base, {e: scale(f, c) for e, f in a.fns.items()},
              a.radius)


def form_sub(a: Form, b: Form, radius=None) -> Form:
  return form_add(a, form_scale(b, -1), radius)


def gradient(f: LocalFunction, edge, inter: Interaction) -> LocalFunction:
  """nabla_e f: the change of f when the interaction fires across the edge."""
  u, v = edge
  support = tuple(sorted(set(f.support) | {u, v}))
  big = embed(f, support)
  pu, pv = support.index(u), support.index(v)
  powers = big.powers()
  vals = []
  for digits in product(range(f.n_states), repeat=len(support)):
    moved = apply_edge(digits, pu, pv, inter)
    if moved == digits:
      vals.append(ZERO)
    else:
      vals.append(big.values[index_of(moved, powers)]
                  - big.values[index_of(digits, powers)])
  return trim(LocalFunction(support, f.n_states, f.base, tuple(vals)))


def differential(f: LocalFunction, window: Window, inter: Interaction,
                 radius: int | None = None) -> Form:
  fns = {}
  for e in window.edges:
    g = gradient(f, e, inter)
    if not g.is_zero():
      fns[e] = g
  form = Form(inter.n_states, inter.base, fns, radius)
  if radius is None:
    form = Form(inter.n_states, inter.base, fns, form_radius(form, window.locale))
  return form


def edge_distance(x, edge, locale: Locale) -> int:
  return min(locale.distance(x, edge[0]), locale.distance(x, edge[1]))


def form_radius(form: Form, locale: Locale) -> int:
  r = 0
  for e, f in form.fns.items():
    for x in f.support:
      r = max(r, edge_distance(x, e, locale))
  return r


def form_axioms_report(form: Form, window: Window, inter: Interaction) -> dict:
  """Check the three structural form axioms on every stored edge.

  (1) edges that do not move a configuration carry value zero; (2) the value
  flips sign when the move is undone across the reversed edge; (3) two edges
  incident to a common site that produce the same move produce the same
  value.  Returns the first witness of each kind, if any.
  """
  vanish = alternation = matching = None
  n = inter.n_states

  for e, f in sorted(form.fns.items()):
    u, v = e
    support = tuple(sorted(set(f.support) | {u, v}))
    fe = embed(f, support)
    pu, pv = support.index(u), support.index(v)
    rev = form.fn((v, u))
    frev = embed(rev, support) if rev is not None else None
    powers = fe.powers()
    for digits, val in zip(product(range(n), repeat=len(support)), fe.values):
      moved = apply_edge(digits, pu, pv, inter)
      if moved == digits:
        if val != 0 and vanish is None:
          vanish = {"edge": _edge_json(window, e), "value": fraction_to_str(val)}
        continue
      back = frev.values[index_of(moved, powers)] if frev is not None else ZERO
      if back != -val and alternation is None:
        alternation = {
            "edge": _edge_json(window, e),
            "value": fraction_to_str(val),
            "reversed_value": fraction_to_str(back),
        }

  edge_list = sorted(form.fns)
  for i, e1 in enumerate(edge_list):
    for e2 in edge_list[i + 1:]:
      if not set(e1) & set(e2):
        continue
      f1, f2 = form.fns[e1], form.fns[e2]
      support = tuple(sorted(set(f1.support) | set(f2.support) | set(e1) | set(e2)))
      b1, b2 = embed(f1, support), embed(f2, support)
      p1 = (support.index(e1[0]), support.index(e1[1]))
      p2 = (support.index(e2[0]), support.index(e2[1]))
      for k, digits in enumerate(product(range(n), repeat=len(support))):
        m1 = apply_edge(digits, p1[0], p1[1], inter)
        m2 = apply_edge(digits, p2[0], p2[1], inter)
        if m1 == m2 and m1 != digits and b1.values[k] != b2.values[k]:
          if matching is None:
            matching = {
                "edges": [_edge_json(window, e1), _edge_json(window, e2)],
                "values": [fraction_to_str(b1.values[k]),
                           fraction_to_str(b2.values[k])],
            }
          break

  ok = vanish is None and alternation is None and matching is None
  return {"ok": ok, "vanishing": vanish, "alternation": alternation,
          "matching_targets": matching}


def _edge_json(window: Window, edge):
  enc = window.locale.encode_vertex
  return [enc(edge[0]), enc(edge[1])]


# ---------------------------------------------------------------------------
# Closedness / integration


class NotClosedError(Exception):
  """Raised when integration meets an inconsistent cycle; carries a witness."""

  def __init__(self, witness):
    super().__init__("form is not closed on this window")
    self.witness = witness


def _reverse_step(window: Window, inter: Interaction, epos, source, target):
  """Find a directed edge whose application maps ``source`` to ``target``."""
  for e, (pu, pv) in zip(window.edges, epos):
    if apply_edge(source, pu, pv, inter) == target:
      return e
  return None


def _potential_scan(form: Form, window: Window, inter: Interaction,
                    budget: int):
  from collections import deque

  total = guard_budget(window, inter, budget)
  n, s = window.n_sites, inter.n_states
  powers = digit_powers(n, s)
  epos = [(window.position(u), window.position(v)) for u, v in window.edges]
  evals = [form.fn(e).compile_for(window) if form.fn(e) is not None else None
           for e in window.edges]

  values = [None] * total
  parent = {}
  star = index_of((inter.base,) * n, powers)
  pins = []
  order = [star] + [i for i in range(total)]

  def digits_for(idx):
    out = []
    rem = idx
    for _ in range(n):
      rem, d = divmod(rem, s)
      out.append(d)
    return tuple(reversed(out))

  for seed in order:
    if values[seed] is not None:
      continue
    values[seed] = ZERO
    pins.append(seed)
    queue = deque([(seed, digits_for(seed))])
    while queue:
      idx, digits = queue.popleft()
      val = values[idx]
      for k, (pu, pv) in enumerate(epos):
        a, b = digits[pu], digits[pv]
        c, d = inter.apply(a, b)
        if (c, d) == (a, b):
          continue
        step = evals[k](digits) if evals[k] is not None else ZERO
        jdx = idx + (c - a) * powers[pu] + (d - b) * powers[pv]
        if values[jdx] is None:
          values[jdx] = val + step
          parent[jdx] = (idx, window.edges[k])
          moved = list(digits)
          moved[pu], moved[pv] = c, d
          queue.append((jdx, tuple(moved)))
        elif values[jdx] != val + step:
          witness = _build_cycle(form, window, inter, parent, pins[-1],
                                 idx, window.edges[k], jdx,
                                 val + step - values[jdx], powers, epos)
          return None, None, witness
  return values, pins, None


def _build_cycle(form, window, inter, parent, pin, idx, edge, jdx, defect,
                 powers, epos):
  """Assemble a closed walk with nonzero integral out of two BFS branches."""
  def chain(to):
    steps = []
    cur = to
    while cur != pin and cur in parent:
      prev, e = parent[cur]
      steps.append((prev, e, cur))
      cur = prev
    return list(reversed(steps))

  n, s = window.n_sites, inter.n_states

  def digits_for(k):
    out = []
    rem = k
    for _ in range(n):
      rem, d = divmod(rem, s)
      out.append(d)
    return tuple(reversed(out))

  walk = chain(idx) + [(idx, edge, jdx)]
  back = []
  for prev, e, cur in reversed(chain(jdx)):
    # Retrace along the reversed arc of the forward step, so that for forms
    # satisfying the alternation axiom the return integral is exactly the
    # negative of the outgoing one.  (Several arcs can realize the same
    # transition; only the partner arc has that property.)
    partner = (e[1], e[0])
    ppu, ppv = window.position(partner[0]), window.position(partner[1])
    if apply_edge(digits_for(cur), ppu, ppv, inter) == digits_for(prev):
      rev = partner
    else:
      rev = _reverse_step(window, inter, epos, digits_for(cur),
                          digits_for(prev))
    if rev is None:
      # No reverse arc: the interaction is not valid in the relaxed sense;
      # report the one-way transition itself.
      rev = e
    back.append((cur, rev, prev))
  walk += back

  from .configspace import config_to_json
  steps_json = []
  integral = ZERO
  for source, e, _target in walk:
    digits = digits_for(source)
    fn = form.fn(e)
    if fn is not None:
      integral += fn.value_at(dict(zip(window.vertices, digits)))
    steps_json.append({
        "config": config_to_json(window, inter, digits),
        "edge": _edge_json(window, e),
    })
  return {
      "cycle": steps_json,
      "integral": fraction_to_str(integral),
      "defect": fraction_to_str(defect),
  }


def is_closed(form: Form, window: Window, inter: Interaction,
              budget: int = 2_000_000) -> dict:
  values, pins, witness = _potential_scan(form, window, inter, budget)
  if witness is not None:
    return {"closed": False, "witness": witness}
  return {"closed": True, "witness": None, "n_components": len(pins)}


def integrate(form: Form, window: Window, inter: Interaction,
              budget: int = 2_000_000):
  """Exact potential of a closed form on the window.

  The potential is pinned to zero at the all-base configuration on its
  component and at the least configuration of every other component.
  Raises ``NotClosedError`` (with a witness cycle) otherwise.
  """
  values, pins, witness = _potential_scan(form, window, inter, budget)
  if witness is not None:
    raise NotClosedError(witness)
  f = LocalFunction(window.vertices, inter.n_states, inter.base, tuple(values))
  return f, {"n_components": len(pins), "pins": pins}


def perturbed(form: Form, window: Window, inter: Interaction, edge,
              cell_assignment: dict, delta) -> Form:
  """Bump one moved cell of one edge function by ``delta``.

  The reversed edge is adjusted in the opposite direction on the image cell,
  so the alternation axiom survives; closedness does not.  The cell is given
  as a sparse {vertex: state_index} assignment and must be moved by the edge.
  """
  delta = Fraction(delta)
  u, v = edge
  f = form.fn(edge) or constant(0, inter.n_states, inter.base)
  rev = form.fn((v, u)) or constant(0, inter.n_states, inter.base)
  common = tuple(sorted(set(f.support) | set(rev.support) | {u, v}
                        | set(cell_assignment)))
  fe, re = embed(f, common), embed(rev, common)
  pu, pv = common.index(u), common.index(v)
  cell = tuple(cell_assignment.get(w, inter.base) for w in common)
  moved = apply_edge(cell, pu, pv, inter)
  if moved == cell:
    raise InputError("perturbation cell must be moved by the edge")
  powers = fe.powers()
  vals = list(fe.values)
  vals[index_of(cell, powers)] += delta
  rvals = list(re.values)
  rvals[index_of(moved, powers)] -= delta
  fns = dict(form.fns)
  fns[edge] = LocalFunction(common, f.n_states, f.base, tuple(vals))
  fns[(v, u)] = LocalFunction(common, rev.n_states, rev.base, tuple(rvals))
  return Form(form.n_states, form.base, fns, form.radius)


# ---------------------------------------------------------------------------
# JSON


def local_function_to_json(f: LocalFunction, locale: Locale) -> dict:
  return {
      "support": [locale.encode_vertex(v) for v in f.support],
      "values": [fraction_to_str(v) for v in f.values],
  }


def local_function_from_json(obj, locale: Locale, inter: Interaction) -> LocalFunction:
  if not isinstance(obj, dict) or "support" not in obj or "values" not in obj:
    raise InputError(f"bad local function {obj!r}")
  support = tuple(sorted(locale.decode_vertex(v) for v in obj["support"]))
  if len(set(support)) != len(support):
    raise InputError("local function support has repeated sites")
  vals = tuple(fraction_from_str(v) for v in obj["values"])
  return LocalFunction(support, inter.n_states, inter.base, vals)


def form_to_json(form: Form, window: Window) -> dict:
  enc = window.locale.encode_vertex
  edges = []
  for e in sorted(form.fns):
    edges.append({
        "e": [enc(e[0]), enc(e[1])],
        "fn": local_function_to_json(form.fns[e], window.locale),
    })
  return {"radius": form.radius, "edges": edges}


def form_from_json(obj, window: Window, inter: Interaction) -> Form:
  if not isinstance(obj, dict) or "edges" not in obj:
    raise InputError(f"bad form payload {obj!r}")
  fns = {}
  dec = window.locale.decode_vertex
  for item in obj["edges"]:
    u, v = dec(item["e"][0]), dec(item["e"][1])
    if (u, v) not in set(window.edges):
      raise InputError(f"form edge ({u!r}, {v!r}) is not a window edge")
    fns[(u, v)] = local_function_from_json(item["fn"], window.locale, inter)
  radius = obj.get("radius")
  return Form(inter.n_states, inter.base, fns,
              int(radius) if radius is not None else None)
