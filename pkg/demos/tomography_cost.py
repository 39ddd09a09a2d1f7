"""Run-count comparison: witness scheme versus naive state tomography.

Tomography needs counts in 3^(1+2M) basis combinations; the witness needs one
fixed basis plus enough attempts to survive the 2M parity-check CNOTs.  Above
the break-even success probability 1/(3 f) the witness scales better as
environments are added.
"""

from qdarwin import cost_model


def main() -> None:
    c = 1000
    print(f"counts per setting C = {c}")
    print(f"{'M':>3} {'p_cnot':>7} {'f':>6} {'tomography':>14} "
          f"{'witness':>16} {'wins':>5}")
    for m in (1, 2, 3, 5):
        for p_cnot, f in ((0.5, 1.0), (0.5, 0.79), (0.25, 1.0)):
            r = cost_model(m, c, p_cnot, f)
            print(f"{m:3d} {p_cnot:7.2f} {f:6.2f} {r.tomography_runs:14d} "
                  f"{r.witness_runs:16.1f} {'yes' if r.witness_wins else 'no':>5}")
    print()
    for f in (1.0, 0.79):
        r = cost_model(1, c, 0.5, f)
        print(f"break-even success probability at f = {f}: {r.crossover_p:.4f}")


if __name__ == "__main__":
    main()
