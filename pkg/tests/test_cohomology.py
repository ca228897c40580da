"""Pairing tables, splitting, uniformization, and the degree-zero count.

The quadratic-defect oracle is frozen from a hand computation: for the
single-species hop with f(eta) = q(sum eta)^2 on a long interval the pairing
cell at (alpha, beta) is 2*alpha*beta and the splitting solves to
h(n) = -n^2 + n on the chain of multiples.
"""

from fractions import Fraction

import pytest

from itertools import product

from configcalc.calculus import (differential, exact_support_radius,
                                 expansion, from_callable, functions_equal)
from configcalc.cohomology import (PairingNotWellDefined, SplittingInfeasible,
                                   check_pairing_laws, compute_pairing,
                                   default_probes, h_zero_report,
                                   inversion_count_function,
                                   ordered_flux_form, pairing_table_to_json,
                                   pairing_table_from_json, solve_splitting,
                                   splitting_to_json, uniformize)
from configcalc.configspace import quantity_of
from configcalc.serialize import InputError
from configcalc.interactions import (by_name, conserved_basis, exclusion,
                                     multispecies)
from configcalc.locales import Euclidean, box


def line(n):
  return box(Euclidean(1), (0,), (n - 1,))


def quadratic_table(n_sites=13):
  win = line(n_sites)
  inter = exclusion()
  basis = conserved_basis(inter)
  f = from_callable(win.vertices, inter.n_states, inter.base,
                    lambda d: Fraction(sum(d)) ** 2)
  return compute_pairing(f, win, inter, basis, radius=5), basis


def test_quadratic_defect_pairing_cells():
  table, basis = quadratic_table()
  # alpha, beta run over particle counts encoded as quantity tuples
  for a in range(4):
    for b in range(4):
      key = ((Fraction(a),), (Fraction(b),))
      if key in table.cells:
        assert table.cells[key] == 2 * a * b, (a, b)
  assert any(k[0] == (Fraction(2),) and k[1] == (Fraction(3),)
             for k in table.cells)


def test_quadratic_defect_split_frozen_values():
  # chain probes: growing left block against one far-right site, so every
  # consecutive cell (k, 1) is present and the constructive method applies
  win = line(13)
  inter = exclusion()
  basis = conserved_basis(inter)
  f = from_callable(win.vertices, inter.n_states, inter.base,
                    lambda d: Fraction(sum(d)) ** 2)
  probes = [(tuple((x,) for x in range(k)), ((11,),)) for k in range(1, 6)]
  table = compute_pairing(f, win, inter, basis, radius=3, probes=probes)
  split = solve_splitting(table)
  assert split["method"] == "chain-iteration"
  h = split["h"]
  frozen = {2: -2, 3: -6, 4: -12, 5: -20, 6: -30}
  for n, val in frozen.items():
    assert h[(Fraction(n),)] == val, n
  assert h[(Fraction(0),)] == 0 and h[(Fraction(1),)] == 0


def test_split_kills_the_defect():
  # h(a+b) - h(a) - h(b) = -H(a, b) on every tabulated cell
  table, basis = quadratic_table()
  split = solve_splitting(table)
  h = split["h"]
  for (a, b), val in table.cells.items():
    total = tuple(x + y for x, y in zip(a, b))
    if total in h and a in h and b in h:
      assert h[total] - h[a] - h[b] == -val


def test_pairing_laws_hold_for_symmetric_table():
  table, basis = quadratic_table(11)
  rep = check_pairing_laws(table)
  assert rep["cocycle"]["ok"]
  assert rep["cocycle"]["checked"] > 0
  assert rep["symmetry"]["ok"]
  assert rep["symmetry"]["checked"] > 0


def test_asymmetric_table_is_infeasible_with_certificate():
  win = line(9)
  inter = multispecies(2)
  basis = conserved_basis(inter)
  f = inversion_count_function(win, inter)
  table = compute_pairing(f, win, inter, basis, radius=3)

  low = (Fraction(1), Fraction(0))
  high = (Fraction(0), Fraction(1))
  assert table.cells[(low, high)] == 1
  assert table.cells[(high, low)] == 0

  rep = check_pairing_laws(table)
  assert rep["cocycle"]["ok"]
  assert not rep["symmetry"]["ok"]
  assert rep["symmetry"]["violations"]

  with pytest.raises(SplittingInfeasible) as exc:
    solve_splitting(table)
  cert = exc.value.certificate
  # the certificate is a rational combination of defining equations whose
  # unknowns cancel while the right-hand sides add to something nonzero;
  # replay it against the table
  total = Fraction(0)
  unknown_balance = {}
  for entry in cert["combination"]:
    coeff = Fraction(entry["coefficient"])
    total += coeff * Fraction(entry["value"])
    if "cell" in entry:
      a = tuple(Fraction(x) for x in entry["cell"]["a"])
      b = tuple(Fraction(x) for x in entry["cell"]["b"])
      assert table.cells[(a, b)] == Fraction(entry["value"])
      s = tuple(x + y for x, y in zip(a, b))
      for q, w in ((a, coeff), (b, coeff), (s, -coeff)):
        unknown_balance[q] = unknown_balance.get(q, Fraction(0)) + w
    else:
      q = tuple(Fraction(x) for x in entry["pin"])
      unknown_balance[q] = unknown_balance.get(q, Fraction(0)) + coeff
  assert all(v == 0 for v in unknown_balance.values())
  assert total == Fraction(cert["contradiction"])
  assert total != 0


def test_pairing_orientation_is_left_to_right():
  win = line(9)
  inter = multispecies(2)
  basis = conserved_basis(inter)
  f = inversion_count_function(win, inter)
  table = compute_pairing(f, win, inter, basis, radius=3)
  # a lone low-species particle LEFT of a high-species one contributes the
  # inversion; the mirrored order does not
  low = (Fraction(1), Fraction(0))
  high = (Fraction(0), Fraction(1))
  assert table.cells[(low, high)] != table.cells[(high, low)]


def test_default_probes_are_oriented_on_the_line():
  win = line(13)
  inter = exclusion()
  probes = default_probes(win, inter, radius=3)
  assert probes
  for first, second in probes:
    assert max(v[0] for v in first) < min(v[0] for v in second)


def test_pairing_requires_enough_room():
  win = line(3)
  inter = exclusion()
  basis = conserved_basis(inter)
  f = from_callable(win.vertices, inter.n_states, inter.base,
                    lambda d: Fraction(sum(d)) ** 2)
  with pytest.raises(InputError):
    compute_pairing(f, win, inter, basis, radius=5)


def test_uniformize_flattens_quadratic_counter():
  # f = (particle count)^2 has exact-support pieces across every site pair;
  # adding the right function of the count must collapse it to a sum of
  # single-site terms
  win = line(13)
  inter = exclusion()
  basis = conserved_basis(inter)
  f = from_callable(win.vertices, inter.n_states, inter.base,
                    lambda d: Fraction(sum(d)) ** 2)
  rep = uniformize(f, win, inter, basis, radius=1)
  assert rep["uniform"]["uniform"]
  assert rep["criterion_ok"]
  g = rep["g"]
  assert exact_support_radius(g, win.locale) == 0
  pieces = expansion(g)
  assert all(len(s) <= 1 for s in pieces)
  # the correction is quadratic with a linear kernel: g is c * count
  region = g.support
  one = {region[0]: 1}
  c = g.value_at(one) - g.value_at({})
  for digits in product(range(2), repeat=len(region)):
    assign = dict(zip(region, digits))
    assert g.value_at(assign) == g.value_at({}) + c * sum(digits)


def test_uniformize_leaves_uniform_function_uniform():
  win = line(13)
  inter = exclusion()
  basis = conserved_basis(inter)
  f = from_callable(win.vertices, inter.n_states, inter.base,
                    lambda d: Fraction(3) * sum(d))
  rep = uniformize(f, win, inter, basis, radius=1)
  assert rep["uniform"]["uniform"]
  assert rep["criterion_ok"]


def test_h_zero_counts_components_by_quantity():
  win = line(3)
  inter = exclusion()
  basis = conserved_basis(inter)
  rep = h_zero_report(win, inter, basis)
  assert rep["h0_dimension"] == 4
  assert rep["c_phi"] == 1
  assert rep["n_quantity_fibers"] == 4
  assert rep["quantities_separate_components"]


def test_h_zero_two_species():
  win = line(2)
  inter = multispecies(2)
  basis = conserved_basis(inter)
  rep = h_zero_report(win, inter, basis)
  # quantities (n1, n2) with n1 + n2 <= 2: six fibers
  assert rep["n_quantity_fibers"] == 6
  assert rep["h0_dimension"] == 6
  assert rep["quantities_separate_components"]


def test_h_zero_flags_quantity_blind_disconnection():
  win = line(4)
  inter = by_name("pair-flip")
  basis = conserved_basis(inter)
  rep = h_zero_report(win, inter, basis)
  assert not rep["quantities_separate_components"]
  assert rep["fiber_witness"] is not None
  assert rep["h0_dimension"] > rep["n_quantity_fibers"]


def test_ordered_flux_is_differential_of_inversions():
  win = line(7)
  inter = multispecies(2)
  f = inversion_count_function(win, inter)
  omega = ordered_flux_form(win, inter)
  df = differential(f, win, inter)
  for e in set(omega.fns) | set(df.fns):
    x = omega.fn(e)
    y = df.fn(e)
    if x is None or y is None:
      assert (x or y).is_zero(), e
    else:
      assert functions_equal(x, y), e


def test_pairing_table_json_roundtrip():
  table, basis = quadratic_table(11)
  obj = pairing_table_to_json(table)
  back = pairing_table_from_json(obj, basis)
  assert back.cells == table.cells


def test_splitting_json_shape():
  table, basis = quadratic_table(11)
  split = solve_splitting(table)
  obj = splitting_to_json(split)
  assert obj["method"] in ("chain-iteration", "linear-solve")
  entries = {tuple(Fraction(x) for x in row["q"]): Fraction(row["v"])
             for row in obj["h"]}
  assert entries == split["h"]
