"""Independent reference implementations used to derive expected values.

Nothing here imports the package under test; each oracle is written
directly from the textbook definition.
"""

import itertools


def truth_table_entails(premises, conclusion, atoms):
    """premises/conclusion are Python predicates over an assignment dict."""
    for values in itertools.product([False, True], repeat=len(atoms)):
        v = dict(zip(atoms, values))
        if all(p(v) for p in premises) and not conclusion(v):
            return False
    return True


def truth_table_satisfiable(formulas, atoms):
    for values in itertools.product([False, True], repeat=len(atoms)):
        v = dict(zip(atoms, values))
        if all(f(v) for f in formulas):
            return True
    return False


def function_space_size(dom_size, cod_size):
    return cod_size ** dom_size


# --- Dung semantics, straight from the definitions over Python sets --------

def _attacks(attacks, s, b):
    return any(a in s and t == b for a, t in attacks)


def conflict_free(attacks, s):
    return not any(a in s and b in s for a, b in attacks)


def acceptable(attacks, s, x):
    attackers = {a for a, b in attacks if b == x}
    return all(_attacks(attacks, s, y) for y in attackers)


def admissible(attacks, s):
    return conflict_free(attacks, s) and all(acceptable(attacks, s, x) for x in s)


def subsets(nodes):
    nodes = sorted(nodes)
    for k in range(len(nodes) + 1):
        for c in itertools.combinations(nodes, k):
            yield frozenset(c)


def complete_extensions(nodes, attacks):
    return {s for s in subsets(nodes)
            if admissible(attacks, s) and {x for x in nodes if acceptable(attacks, s, x)} == set(s)}


def grounded_extension(nodes, attacks):
    # least complete extension
    comps = complete_extensions(nodes, attacks)
    return min(comps, key=len)


def preferred_extensions(nodes, attacks):
    adm = [s for s in subsets(nodes) if admissible(attacks, s)]
    return {s for s in adm if not any(s < t for t in adm)}


def stable_extensions(nodes, attacks):
    return {s for s in subsets(nodes)
            if conflict_free(attacks, s) and all(_attacks(attacks, s, x) for x in set(nodes) - s)}


# --- Kripke truth, with worlds as ints and relations as sets of pairs -----

def modal_truth(f, worlds, rel, val, x):
    """f is a nested tuple: ('p',), ('not', f), ('and', f, g), ('imp', f, g),
    ('box', f), ('dia', f)."""
    op = f[0]
    if op == "not":
        return not modal_truth(f[1], worlds, rel, val, x)
    if op == "and":
        return modal_truth(f[1], worlds, rel, val, x) and modal_truth(f[2], worlds, rel, val, x)
    if op == "imp":
        return (not modal_truth(f[1], worlds, rel, val, x)) or modal_truth(f[2], worlds, rel, val, x)
    if op == "box":
        return all(modal_truth(f[1], worlds, rel, val, y) for y in worlds if (x, y) in rel)
    if op == "dia":
        return any(modal_truth(f[1], worlds, rel, val, y) for y in worlds if (x, y) in rel)
    return x in val[op]
