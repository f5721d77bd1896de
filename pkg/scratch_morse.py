"""Scratch verification of Appendix-B closed forms before freezing morse.py.

Checks, per mode (scale gamma / width beta / depth Um), units Um=beta=1, m=1/2
except the varied parameter:
  1. Omega closed forms vs full-loop area quadrature  (B11, B18, B23)
  2. <d_lambda H0> closed form (-dOmega/dE / dOmega... ) vs orbit time-average
  3. candidate xi closed forms vs dxi/dt = source along H0 orbits
"""
import numpy as np
from scipy.integrate import quad, solve_ivp

# ---------- generic machinery (m = 1/2 throughout: H0 = p^2 + U) ----------

def area(E, U, q1, q2):
    # full-loop area = 2 * int sqrt(E-U) dq  (p = sqrt(2m(E-U)) = sqrt(E-U))
    c, r = 0.5*(q1+q2), 0.5*(q2-q1)
    def f(th):
        q = c - r*np.cos(th)
        v = max(E - U(q), 0.0)
        return np.sqrt(v)*r*np.sin(th)
    val, _ = quad(f, 0, np.pi, epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0*val

def orbit(E, U, dU, q1, T, n=4000):
    # start at inner turning point, integrate one period
    def rhs(t, y):
        q, p = y
        return (2.0*p, -dU(q))
    ts = np.linspace(0, T, n)
    sol = solve_ivp(rhs, (0, T), [q1*(1+1e-13)+1e-13, 0.0], t_eval=ts,
                    rtol=1e-12, atol=1e-14)
    return sol.t, sol.y[0], sol.y[1]

def timeavg(vals, ts):
    from scipy.integrate import simpson
    return simpson(vals, x=ts)/(ts[-1]-ts[0])

# ---------- scale mode ----------
def scale_funcs(g):
    U  = lambda q: (np.exp(-2*q/g) - 2*np.exp(-q/g))/g**2
    dU = lambda q: (-2*np.exp(-2*q/g) + 2*np.exp(-q/g))/g**3
    dlU= lambda q: (-2/g**3)*(np.exp(-2*q/g)-2*np.exp(-q/g)) + (2*q/g**4)*(np.exp(-2*q/g)-np.exp(-q/g))
    return U, dU, dlU

print("== scale: Omega and <dH0/dgamma> ==")
for g in (0.5, 1.0, 1.7):
    for E in (-0.3/g**2, -0.77/g**2):
        a = np.sqrt(1+E*g*g)
        q1, q2 = -g*np.log(1+a), -g*np.log(1-a)
        U, dU, dlU = scale_funcs(g)
        closed = 2*np.pi*(1-np.sqrt(-E*g*g))
        quadr = area(E, U, q1, q2)
        k = np.sqrt(-E)
        T = np.pi*g/k
        ts, qs, ps = orbit(E, U, dU, q1, T)
        avg = timeavg(dlU(qs), ts)              # dH0/dgamma = dU/dgamma
        print(f" g={g} E={E:.4f} Omega rel err={abs(quadr-closed)/closed:.2e} "
          f"avg={avg:.8f} closed={-2*E/g:.8f}")

print("== width: Omega fixed (1/beta) vs printed (1/beta^2) ==")
for b in (0.5, 1.0, 2.0):
    E = -0.4
    a = np.sqrt(1+E)
    q1, q2 = -np.log(1+a)/b, -np.log(1-a)/b
    U  = lambda q: np.exp(-2*b*q) - 2*np.exp(-b*q)
    quadr = area(E, U, q1, q2)
    fixed  = 2*np.pi*(1/b - np.sqrt(-E)/b)
    printed= 2*np.pi*(1/b**2 - np.sqrt(-E)/b)
    print(f" b={b} quad={quadr:.8f} fixed={fixed:.8f} printed={printed:.8f}")

print("== width: <dH0/dbeta> ==")
for b in (0.5, 2.0):
    E = -0.4
    a = np.sqrt(1+E); k = np.sqrt(-E)
    q1 = -np.log(1+a)/b
    U  = lambda q: np.exp(-2*b*q) - 2*np.exp(-b*q)
    dU = lambda q: -2*b*np.exp(-2*b*q) + 2*b*np.exp(-b*q)
    dlU= lambda q: -2*q*np.exp(-2*b*q) + 2*q*np.exp(-b*q)
    T = np.pi/(b*k)
    ts, qs, ps = orbit(E, U, dU, q1, T)
    avg = timeavg(dlU(qs), ts)
    print(f" b={b} avg={avg:.8f} derived={(2/b)*(k+E):.8f} "
          f"paper-chain={4*k/b**2+2*E/b:.8f}")

print("== depth: <dH0/dUm> ==")
for um in (0.5, 2.0):
    E = -0.4*um
    k = np.sqrt(-E)
    a = np.sqrt(1+E/um)
    q1 = -np.log(1+a)
    U  = lambda q: um*(np.exp(-2*q) - 2*np.exp(-q))
    dU = lambda q: um*(-2*np.exp(-2*q) + 2*np.exp(-q))
    dlU= lambda q: np.exp(-2*q) - 2*np.exp(-q)
    T = np.pi/k
    ts, qs, ps = orbit(E, U, dU, q1, T)
    avg = timeavg(dlU(qs), ts)
    closed = 2*np.pi*(np.sqrt(um)-k)
    quadr = area(E, U, q1, -np.log(1-a))
    print(f" um={um} Omega rel={abs(quadr-closed)/closed:.2e} "
          f"avg={avg:.8f} derived={-k/np.sqrt(um):.8f}")
