"""Independent thermal SYK_4 solve used to freeze reference values for the C++ tests.

Works on a grid twice as fine and twice as wide as the library default and
builds the retarded self-energy from the occupation function
n(t) = int dw/2pi exp(-iwt) A(w) nF(w) as
    Sigma_R(w) = -i J^2 int_0^inf dt exp(iwt) (n(t)^3 + conj(n(t))^3).
Run:  python3 tests/oracles/equilibrium_oracle.py
"""
import numpy as np


def solve(beta, J=0.5, wmax=32.0, n=16384, mixing=0.3, tol=1e-12, iters=20000):
    dw = 2 * wmax / n
    w = (np.arange(n) - n // 2) * dw
    dt = np.pi / wmax
    nf = 0.5 * (1 - np.tanh(0.5 * beta * w))
    gr = 1.0 / (w + 1j * J)

    def occ_time(a):
        # n(t_m) = sum_k dw/2pi a_k nF_k exp(-i w_k t_m), centred indices
        x = a * nf * dw / (2 * np.pi)
        y = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(x)))  # exp(-2 pi i k m / n)
        return y

    for it in range(iters):
        a = -2 * gr.imag
        nt = occ_time(a)
        h = np.zeros(n, complex)
        m0 = n // 2
        h[m0:] = -1j * J**2 * (nt[m0:] ** 3 + np.conj(nt[m0:]) ** 3) * dt
        h[m0] *= 0.5
        sig = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(h))) * n  # exp(+2 pi i k m / n)
        new = 1.0 / (w - sig)
        res = np.max(np.abs(new - gr))
        gr = gr + mixing * (new - gr)
        if res < tol:
            break
    a = -2 * gr.imag
    return w, gr, a, it + 1


if __name__ == "__main__":
    for beta in (0.5, 2.4):
        w, gr, a, its = solve(beta)
        dw = w[1] - w[0]
        print(f"beta={beta} iterations={its} sum_rule={a.sum() * dw / (2 * np.pi):.10f}")
        for x in (0.0, 0.25, 0.5, 1.0):
            k = np.argmin(np.abs(w - x))
            print(f"  w={w[k]:.4f} ReGR={gr[k].real:.10f} ImGR={gr[k].imag:.10f}")
