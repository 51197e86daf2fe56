# SPDX-License-Identifier: Apache-2.0
"""Independent reference for one N = 2 robust subproblem, solved with cvxpy.

The instance below is duplicated in tests/test_robust.cpp; the printed optimum
is frozen there. Run: python3 tests/oracles/robust_n2_oracle.py
"""
import cvxpy as cp
import numpy as np

N = 2
P = 10 ** 0.5
sig_a = sig_b = sig_e = 1.0
zeta = 0.01
eps = 0.05
tau1, tau2, rho = 0.05, 0.05, 0.002

h_ab = np.array([0.8 + 0.3j, -0.4 + 0.9j])
h_aa = np.array([0.5 - 0.2j, 0.7 + 0.1j])
h_ba = np.array([-0.6 + 0.5j, 0.2 - 0.8j])
h_bb = np.array([0.3 + 0.6j, -0.9 + 0.2j])
xi = 0.01 * (1 + 1j) * np.ones(N)
omega = np.outer(xi, xi.conj()) + rho * np.eye(N)

qa_k = P / (2 * N) * np.eye(N)
qb_k = P / (2 * N) * np.eye(N)
nu_k = 0.5


def quad(h, q):
    return cp.real(h.conj() @ q @ h)


ia_k = sig_a + zeta * np.real(h_aa.conj() @ qa_k @ h_aa)
ib_k = sig_b + zeta * np.real(h_bb.conj() @ qb_k @ h_bb)
phi2_k = np.log1p(nu_k) + np.log(ia_k) + np.log(ib_k)

Qa = cp.Variable((N, N), hermitian=True)
Qb = cp.Variable((N, N), hermitian=True)
nu = cp.Variable()
mu = cp.Variable()
alpha = cp.Variable()
cons = [Qa >> 0, Qb >> 0, cp.real(cp.trace(Qa)) <= P, cp.real(cp.trace(Qb)) <= P, nu >= 0, mu >= 0]
budget = alpha
lam, B = [], []
for i in range(2):
    S = cp.Variable((N, N), hermitian=True)
    l = cp.Variable((N, 1), complex=True)
    th = cp.Variable()
    A = cp.Variable((N, N), hermitian=True)
    Bi = cp.Variable((N, N), hermitian=True)
    C = cp.Variable((N, N), hermitian=True)
    gamma = cp.bmat([[S, l], [cp.conj(l).T, cp.reshape(th, (1, 1), order="F")]])
    phi = cp.bmat([[A, Bi], [Bi, C]])
    cons += [gamma >> 0, phi >> 0]
    psi = np.block([[tau1 * np.eye(N), -xi[:, None]], [-xi[None, :].conj(), np.array([[tau1]])]])
    xim = np.block([[tau2 * np.eye(N), -omega], [-omega, tau2 * np.eye(N)]])
    budget = budget + cp.real(cp.trace(gamma @ psi)) + cp.real(cp.trace(phi @ xim))
    lam.append(l)
    B.append(Bi)
cons.append(budget <= eps * mu)

Z = np.zeros((N, N))
z1 = np.zeros((N, 1))
a11 = cp.reshape(-alpha, (1, 1), order="F")
a22 = cp.reshape(mu - alpha - sig_e * nu, (1, 1), order="F")
L1 = cp.bmat([[2 * B[0], Z, lam[0]], [Z, 2 * B[1], lam[1]], [cp.conj(lam[0]).T, cp.conj(lam[1]).T, a11]])
L2 = cp.bmat([[2 * B[0] + Qa, Z, lam[0]], [Z, 2 * B[1] + Qb, lam[1]], [cp.conj(lam[0]).T, cp.conj(lam[1]).T, a22]])
cons += [(L1 + L1.H) / 2 << 0, (L2 + L2.H) / 2 << 0]

phi1 = cp.log(sig_a + zeta * quad(h_aa, Qa) + quad(h_ba, Qb)) + cp.log(sig_b + zeta * quad(h_bb, Qb) + quad(h_ab, Qa))
ga = zeta * np.outer(h_aa, h_aa.conj()) / ia_k
gb = zeta * np.outer(h_bb, h_bb.conj()) / ib_k
phi2_lin = (phi2_k + cp.real(cp.trace(ga @ (Qa - qa_k))) + cp.real(cp.trace(gb @ (Qb - qb_k)))
            + (nu - nu_k) / (1 + nu_k))
prob = cp.Problem(cp.Maximize(phi1 - phi2_lin), cons)
prob.solve(solver=cp.CLARABEL)
print(prob.status)
print(f"{prob.value:.12f}")
print("nu", float(nu.value), "mu", float(mu.value))
