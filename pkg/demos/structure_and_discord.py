"""Correlation measures and objectivity structure verdicts for key states.

Objectivity is stronger than decoherence: the maximally mixed state is
incoherent yet non-objective (no information is shared at all), while the
branching state is objective for either single environment but not for the
pair (the remaining correlations are quantum).
"""

from qdarwin import (
    NoiseConfig,
    check_structure,
    computational_spec,
    correlation_report,
    maximally_mixed,
    parity_spec,
    prepare_initial_isbs,
    prepare_initial_sqd,
    sqd_layout,
)


def show(name, rho, spec, fragment):
    verdict = check_structure(rho, spec, fragment)
    members = spec.members_of(fragment)
    info = correlation_report(rho, "S", set(members))
    print(f"{name}, fragment {'+'.join(fragment)}")
    print(f"  I(S:F) = {info.mutual_information:.6f} bits,"
          f" discord = {info.discord:.6f}, Holevo = {info.holevo:.6f},"
          f" H(S) = {info.system_entropy:.6f}")
    print(f"  information condition: {verdict.qd},"
          f" zero-discord objectivity: {verdict.sqd}")
    print(f"  block structure: {verdict.bipartite_sbs},"
          f" pure product conditionals: {verdict.isbs}")
    print()


def main() -> None:
    branching = prepare_initial_sqd(NoiseConfig())
    parity = parity_spec(2)
    show("branching state", branching, parity, ("E1",))
    show("branching state", branching, parity, ("E1", "E2"))
    show("maximally mixed", maximally_mixed(sqd_layout()), parity, ("E1",))

    ghz = prepare_initial_isbs(NoiseConfig())
    comp = computational_spec(4)
    show("five-photon GHZ", ghz, comp, ("E1",))
    show("five-photon GHZ", ghz, comp, ("E1", "E2", "E3", "E4"))


if __name__ == "__main__":
    main()
