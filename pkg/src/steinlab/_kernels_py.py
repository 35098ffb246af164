"""Pure-Python enumeration kernel; reference for the compiled ``_kernels``.

Polynomials are ``x^d + c_1 x^(d-1) + ... + c_d``.  Newton's identities tie
the coefficients to the power sums ``s_k`` of the roots; a polynomial whose
roots all have modulus ``<= a`` has ``|s_k| <= d a^k`` for every ``k``.
"""


def _floor_div(a, b):
    return a // b


def _ceil_div(a, b):
    return -((-a) // b)


def enumerate_prefix(d, sum_bounds, coeff_bounds, prefix):
    """Coefficient tuples ``(c_1..c_d)`` extending ``prefix`` that pass every
    power-sum test ``|s_k| <= sum_bounds[k-1]``, ``k = 1..len(sum_bounds)``.

    ``coeff_bounds[k-1]`` caps ``|c_k|``.  Returns ``(leaves, nodes)`` with
    leaves in lexicographic order and ``nodes`` the number of tree nodes
    visited.
    """
    K = len(sum_bounds)
    c = [0] * (d + 1)
    s = [0] * (K + 1)
    out = []
    nodes = 0

    # replay the prefix, rejecting it outright if it already fails
    for k, ck in enumerate(prefix, start=1):
        t = 0
        for i in range(1, k):
            t += c[i] * s[k - i]
        sk = -t - k * ck
        if abs(ck) > coeff_bounds[k - 1] or abs(sk) > sum_bounds[k - 1]:
            return out, nodes
        c[k] = ck
        s[k] = sk

    def leaf_ok():
        for k in range(d + 1, K + 1):
            t = 0
            for i in range(1, d + 1):
                t += c[i] * s[k - i]
            if abs(t) > sum_bounds[k - 1]:
                return False
            s[k] = -t
        return True

    def rec(k):
        nonlocal nodes
        if k > d:
            if leaf_ok():
                out.append(tuple(c[1:]))
            return
        t = 0
        for i in range(1, k):
            t += c[i] * s[k - i]
        b = sum_bounds[k - 1]
        lo = max(-coeff_bounds[k - 1], _ceil_div(-b - t, k))
        hi = min(coeff_bounds[k - 1], _floor_div(b - t, k))
        for ck in range(lo, hi + 1):
            nodes += 1
            c[k] = ck
            s[k] = -t - k * ck
            rec(k + 1)

    rec(len(prefix) + 1)
    return out, nodes
