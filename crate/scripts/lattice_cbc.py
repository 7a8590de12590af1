"""Fast component-by-component construction of rank-1 lattice generating vectors.

Prime point counts n just below powers of two, product weights gamma_j = 1/j^2,
worst-case error criterion for the Korobov space with smoothness 2. Prints the
Rust table used by the normal CDF lattice rule.
"""

import numpy as np
import sympy

DIMS = 15
PRIMES = [int(sympy.prevprime(2**k + 1)) for k in range(13, 21)]


def omega(x):
    return 2.0 * np.pi**2 * (x * x - x + 1.0 / 6.0)


def cbc(n, dims):
    g = int(sympy.primitive_root(n))
    # powers g^b mod n for b = 0..n-2
    perm = np.empty(n - 1, dtype=np.int64)
    v = 1
    for b in range(n - 1):
        perm[b] = v
        v = v * g % n
    psi = omega(perm / n)
    fft_psi = np.fft.fft(psi)
    p = np.ones(n)
    z = []
    for j in range(1, dims + 1):
        gamma = 1.0 / j**2
        c = p[perm]
        # E(a) = sum_b c_b psi_{a+b}
        e = np.real(np.fft.ifft(np.conj(np.fft.fft(c)) * fft_psi))
        a = int(np.argmin(e))
        zj = int(perm[a])
        z.append(zj)
        k = np.arange(n)
        p *= 1.0 + gamma * omega((k * zj % n) / n)
    return z


def main():
    print("const LATTICES: [(u32, [u32; %d]); %d] = [" % (DIMS, len(PRIMES)))
    for n in PRIMES:
        z = cbc(n, DIMS)
        print("    (%d, [%s])," % (n, ", ".join(str(v) for v in z)))
    print("];")


if __name__ == "__main__":
    main()
