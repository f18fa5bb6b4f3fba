#!/usr/bin/env python3
"""Run every attack scenario at desk scale and summarize the defenses.

Each scenario is deterministic in its seed; rerunning this script yields
byte-identical metrics. The replay column confirms that metrics recomputed
purely from the exported event log match the live run.
"""

from ddrm import AttackScenario, replay_verify, run_scenario
from ddrm.reporting import format_metrics_table

SCENARIOS = [
    AttackScenario(name="sybil", kind="sybil", seed=101, rounds=5,
                   attacker_count=4, fake_identities_per_attacker=6, honest_count=10),
    AttackScenario(name="ballot-stuffing", kind="ballot_stuffing", seed=102, rounds=10,
                   attacker_count=2, honest_count=9),
    AttackScenario(name="bad-mouthing", kind="bad_mouthing", seed=103, rounds=14,
                   attacker_count=2, honest_count=9),
    AttackScenario(name="collusion", kind="collusion", seed=104, rounds=12,
                   attacker_count=2, honest_count=9),
    AttackScenario(name="whitewashing", kind="whitewashing", seed=105, rounds=14,
                   attacker_count=2, fake_identities_per_attacker=5, honest_count=9),
    AttackScenario(name="constant-attack", kind="constant_attack", seed=106, rounds=6,
                   attacker_count=3, honest_count=8),
    AttackScenario(name="majority-endorser", kind="majority_endorser", seed=107, rounds=8,
                   attacker_count=4, honest_count=3),
    AttackScenario(name="false-refund", kind="false_refund", seed=108, rounds=6,
                   attacker_count=2, honest_count=9),
]

VERDICTS = {
    "sybil": lambda r: f"{r.extras['sybil_registrations_succeeded']} of "
                       f"{r.extras['sybil_registrations_attempted']} registrations succeeded "
                       "(one per card)",
    "ballot-stuffing": lambda r: f"{r.metrics.attacker_reviews_branded} fake reviews branded; "
                                 f"spend {r.metrics.attacker_spend_wei / 1e18:.2f} ETH, zero reputation gained",
    "bad-mouthing": lambda r: f"exclusions: {r.metrics.exclusions}; "
                              f"badge accuracy {r.metrics.badge_accuracy:.2f}",
    "collusion": lambda r: f"{r.metrics.attacker_reviews_branded} colluding reviews branded, "
                           f"{r.metrics.exclusions} excluded",
    "whitewashing": lambda r: f"{r.extras['whitewash_reregistrations_succeeded']} of "
                              f"{r.extras['whitewash_reregistrations_attempted']} re-registrations succeeded",
    "constant-attack": lambda r: f"{r.metrics.attacker_reviews_accepted} reviews accepted without purchase",
    "majority-endorser": lambda r: "DEFENSE FAILS (known limit): badge accuracy "
                                   f"{r.metrics.badge_accuracy:.2f} under roster capture",
    "false-refund": lambda r: f"{r.metrics.refund_fraud_approved} fraudulent refunds approved",
}


def main():
    results = []
    for scenario in SCENARIOS:
        result = run_scenario(scenario)
        replayed = replay_verify(result.log_text())
        assert replayed == result.metrics, "log replay diverged from live metrics"
        results.append((scenario.name, result))

    print(format_metrics_table([(name, r.metrics) for name, r in results]))
    print()
    for name, result in results:
        print(f"{name:18s} {VERDICTS[name](result)}")
    print("\nall event logs chain-verified and replay-consistent")


if __name__ == "__main__":
    main()
