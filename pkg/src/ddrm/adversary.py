"""Adversary harness: rater personas, attack scenarios, metrics, log replay.

A scenario is fully determined by its fields plus a seed. The runner builds
a population of honest and dishonest raters against services with a fixed
ground-truth quality, then drives rounds of

    purchases -> reviews -> endorsements -> selection -> refunds

advancing one tick per phase. Protocol rejections never abort a run; they
are recorded as denial counts. Metrics are computed twice by independent
routes: live from simulation state and counters, and by replay_verify()
purely from an exported event log. The two must agree exactly.

Voting behavior: honest endorsers vote Up on reviews whose rating band
matches the service's ground truth and Down otherwise (inverted with
probability 1 - honest_vote_probability), piling onto mismatched reviews
first; dishonest endorsers up-vote fellow attackers and down-vote everyone
else, with a per-kind choice of whether boosting allies or burying enemies
comes first. A rater's budget is simply its account balance: personas act
until the ledger refuses to fund them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import REVIEW_FUND_SEED, REVIEW_SUBSIDY, ProtocolConfig, parse_protocol_config
from .endorsement import (
    BADGE_AUTHENTIC,
    BADGE_FRAUDULENT,
    BADGE_PENDING,
    OUTCOME_APPROVED,
    OUTCOME_OPEN,
    VOTE_APPROVE,
    VOTE_DOWN,
    VOTE_REJECT,
    VOTE_UP,
    text_digest,
)
from .errors import ConfigError, DdrmError, DuplicateCard
from .identity import ROLE_CONSUMER, ROLE_PROVIDER, STATUS_EXCLUDED
from .ledger import (
    OP_ADD_SERVICE,
    OP_ENDORSE_REVIEW,
    OP_REQUEST_SERVICE,
    EventRecord,
    ether,
    load_log_lines,
    verify_log_records,
)
from .sim import Simulation

HAPPY_HONEST = "HappyHonest"
UNHAPPY_HONEST = "UnhappyHonest"
HAPPY_DISHONEST = "HappyDishonest"
UNHAPPY_DISHONEST = "UnhappyDishonest"

GOOD = "Good"
BAD = "Bad"

KIND_SYBIL = "sybil"
KIND_BALLOT_STUFFING = "ballot_stuffing"
KIND_BAD_MOUTHING = "bad_mouthing"
KIND_COLLUSION = "collusion"
KIND_WHITEWASHING = "whitewashing"
KIND_CONSTANT_ATTACK = "constant_attack"
KIND_MAJORITY_ENDORSER = "majority_endorser"
KIND_FALSE_REFUND = "false_refund"
ALL_KINDS = (
    KIND_SYBIL,
    KIND_BALLOT_STUFFING,
    KIND_BAD_MOUTHING,
    KIND_COLLUSION,
    KIND_WHITEWASHING,
    KIND_CONSTANT_ATTACK,
    KIND_MAJORITY_ENDORSER,
    KIND_FALSE_REFUND,
)

# Attack kinds where burying honest reviews matters more to the adversary
# than boosting their own.
_ENEMY_FIRST_KINDS = (KIND_MAJORITY_ENDORSER,)


@dataclass(frozen=True)
class AttackScenario:
    name: str
    kind: str
    seed: int | None = None
    rounds: int = 10
    attacker_count: int = 1
    fake_identities_per_attacker: int = 1
    honest_count: int = 12
    service_cost_wei: int = ether("0.5")
    target_own: bool = True            # ballot stuffing: self-listing vs competitor
    honest_vote_probability: float = 1.0
    overrides: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.name:
            raise ConfigError("scenario name required")
        if self.kind not in ALL_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.rounds < 1:
            raise ConfigError("rounds must be at least 1")
        if self.attacker_count < 0 or self.honest_count < 0:
            raise ConfigError("participant counts cannot be negative")
        if self.fake_identities_per_attacker < 1:
            raise ConfigError("fake_identities_per_attacker must be at least 1")
        if self.service_cost_wei <= 0:
            raise ConfigError("service cost must be strictly positive")
        if not 0.0 <= self.honest_vote_probability <= 1.0:
            raise ConfigError("honest_vote_probability must lie in [0, 1]")


def parse_scenario(doc, index: int = 0) -> AttackScenario:
    if not isinstance(doc, dict):
        raise ConfigError(f"scenario #{index} must be an object")
    allowed = {
        "name", "kind", "seed", "rounds", "attacker_count", "fake_identities_per_attacker",
        "honest_count", "service_cost_ether", "target_own", "honest_vote_probability", "protocol",
    }
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in scenario #{index}: {', '.join(sorted(unknown))}")
    if "kind" not in doc:
        raise ConfigError(f"scenario #{index} missing 'kind'")
    kwargs: dict = {"kind": doc["kind"], "name": doc.get("name", f"{doc['kind']}-{index}")}
    for key in ("seed", "rounds", "attacker_count", "fake_identities_per_attacker", "honest_count"):
        if key in doc:
            value = doc[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"scenario {kwargs['name']}: {key} must be an integer")
            kwargs[key] = value
    if "service_cost_ether" in doc:
        kwargs["service_cost_wei"] = ether(doc["service_cost_ether"])
    if "target_own" in doc:
        if not isinstance(doc["target_own"], bool):
            raise ConfigError(f"scenario {kwargs['name']}: target_own must be a boolean")
        kwargs["target_own"] = doc["target_own"]
    if "honest_vote_probability" in doc:
        hvp = doc["honest_vote_probability"]
        if isinstance(hvp, bool) or not isinstance(hvp, (int, float)):
            raise ConfigError(f"scenario {kwargs['name']}: honest_vote_probability must be a number")
        kwargs["honest_vote_probability"] = float(hvp)
    overrides = doc.get("protocol", {})
    if not isinstance(overrides, dict):
        raise ConfigError(f"scenario {kwargs['name']}: protocol overrides must be an object")
    kwargs["overrides"] = overrides
    scenario = AttackScenario(**kwargs)
    scenario.validate()
    return scenario


@dataclass(frozen=True)
class ScenarioMetrics:
    badge_accuracy: float = 0.0
    attacker_spend_wei: int = 0
    attacker_reviews_accepted: int = 0
    attacker_reviews_branded: int = 0
    exclusions: int = 0
    refund_fraud_approved: int = 0
    provider_dret_delta: int = 0

    def to_dict(self) -> dict:
        return {
            "badge_accuracy": self.badge_accuracy,
            "attacker_spend_wei": self.attacker_spend_wei,
            "attacker_reviews_accepted": self.attacker_reviews_accepted,
            "attacker_reviews_branded": self.attacker_reviews_branded,
            "exclusions": self.exclusions,
            "refund_fraud_approved": self.refund_fraud_approved,
            "provider_dret_delta": self.provider_dret_delta,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ScenarioMetrics":
        return ScenarioMetrics(**doc)


def rating_band(rating: int) -> str:
    if rating >= 4:
        return "positive"
    if rating <= 2:
        return "negative"
    return "neutral"


def band_matches(rating: int, quality: str) -> bool:
    band = rating_band(rating)
    return (band == "positive" and quality == GOOD) or (band == "negative" and quality == BAD)


def expected_badge(rating: int, quality: str) -> str:
    """The badge a perfectly informed jury would assign."""
    return BADGE_AUTHENTIC if band_matches(rating, quality) else BADGE_FRAUDULENT


@dataclass
class Member:
    pid: str
    category: str
    attacker: bool
    card: str


@dataclass
class ScenarioResult:
    scenario: AttackScenario
    metrics: ScenarioMetrics
    extras: dict
    sim: Simulation

    def log_text(self) -> str:
        return self.sim.ledger.export_log()

    def final_log_hash(self) -> str:
        return self.sim.ledger.final_hash()


class ScenarioRunner:
    """Executes one attack scenario against a fresh simulation."""

    def __init__(self, scenario: AttackScenario, protocol: ProtocolConfig | None = None, default_seed: int = 42):
        scenario.validate()
        self.scenario = scenario
        base = protocol or ProtocolConfig()
        self.protocol = parse_protocol_config(scenario.overrides, base=base) if scenario.overrides else base
        self.seed = scenario.seed if scenario.seed is not None else default_seed
        self.sim = Simulation(self.protocol, self.seed)
        self.members: dict[str, Member] = {}
        self.consumers: list[str] = []
        self.ground_truth: dict[str, str] = {}
        self.target_providers: list[str] = []
        self.attacker_service: str | None = None
        self.victim_service: str | None = None
        self.spend = 0
        self.reviews_accepted = 0
        self.extras = {
            "sybil_registrations_attempted": 0,
            "sybil_registrations_succeeded": 0,
            "whitewash_reregistrations_attempted": 0,
            "whitewash_reregistrations_succeeded": 0,
            "denials": {},
            "victim_revenue_wei": 0,
        }
        self._whitewash_done: set[str] = set()
        self._claims_filed: set[str] = set()
        self._round_votes: dict[str, int] = {}

    # -- bookkeeping helpers --

    def _deny(self, exc: DdrmError) -> None:
        name = type(exc).__name__
        self.extras["denials"][name] = self.extras["denials"].get(name, 0) + 1

    def _attackers(self) -> list[str]:
        return sorted(pid for pid, m in self.members.items() if m.attacker)

    def _is_attacker(self, pid: str) -> bool:
        return pid in self.members and self.members[pid].attacker

    def _add_member(self, card: str, category: str, attacker: bool, roles) -> str:
        pid = self.sim.register(card, roles)
        self.members[pid] = Member(pid=pid, category=category, attacker=attacker, card=card)
        return pid

    # -- population --

    def _build_population(self) -> None:
        s = self.scenario
        kind = s.kind
        self_listing = kind == KIND_BALLOT_STUFFING and s.target_own
        needs_attack_service = kind == KIND_COLLUSION or self_listing

        if not self_listing:
            hp = self._add_member("honest-provider-0", HAPPY_HONEST, False, {ROLE_PROVIDER})
            self.victim_service = self.sim.add_service(hp, s.service_cost_wei)
            self.ground_truth[self.victim_service] = GOOD

        attacker_provider = None
        if needs_attack_service:
            attacker_provider = self._add_member("attacker-provider-0", HAPPY_DISHONEST, True, {ROLE_PROVIDER})
            self.spend += self.sim.ledger.gas_cost(OP_ADD_SERVICE) + REVIEW_FUND_SEED
            self.attacker_service = self.sim.add_service(attacker_provider, s.service_cost_wei)
            self.ground_truth[self.attacker_service] = BAD

        # Attackers register before honest consumers when the attack depends
        # on being among a service's earliest reviewers.
        attacker_category = {
            KIND_BAD_MOUTHING: UNHAPPY_DISHONEST,
            KIND_WHITEWASHING: UNHAPPY_DISHONEST,
            KIND_FALSE_REFUND: UNHAPPY_DISHONEST,
        }.get(kind, HAPPY_DISHONEST)
        honest_category = UNHAPPY_HONEST if kind == KIND_BALLOT_STUFFING and s.target_own else HAPPY_HONEST

        def register_attackers():
            for i in range(s.attacker_count):
                card = f"attacker-card-{i}"
                for _ in range(s.fake_identities_per_attacker):
                    self.extras["sybil_registrations_attempted"] += 1
                    try:
                        self._add_member(card, attacker_category, True, {ROLE_CONSUMER})
                        self.extras["sybil_registrations_succeeded"] += 1
                    except DuplicateCard as exc:
                        self._deny(exc)

        def register_honest():
            for i in range(s.honest_count):
                self._add_member(f"honest-card-{i}", honest_category, False, {ROLE_CONSUMER})

        if kind == KIND_MAJORITY_ENDORSER:
            register_attackers()
            register_honest()
        else:
            register_honest()
            register_attackers()

        self.consumers = sorted(
            pid for pid, m in self.members.items()
            if ROLE_CONSUMER in self.sim.identity.get(pid).roles
        )
        # DRET deltas are tracked for the service the attack aims at: the
        # attacker's own listing when self-listing, the victim's otherwise.
        if attacker_provider is not None:
            self.target_providers = [attacker_provider]
        elif self.victim_service is not None:
            self.target_providers = [self.sim.market.get_service(self.victim_service).provider]
        else:
            self.target_providers = []

        self.sim.ledger.append_event(
            "ScenarioSetup",
            {
                "scenario": s.name,
                "kind": kind,
                "attackers": self._attackers(),
                "ground_truth": dict(sorted(self.ground_truth.items())),
                "target_providers": list(self.target_providers),
            },
        )

    # -- per-round behavior --

    def _services_for(self, member: Member) -> list[str]:
        """Which services this member buys and reviews."""
        kind = self.scenario.kind
        if kind == KIND_COLLUSION:
            return sorted(self.ground_truth)
        if kind == KIND_BALLOT_STUFFING and self.scenario.target_own:
            return [self.attacker_service]
        return [self.victim_service] if self.victim_service else []

    def _buys_this_round(self, member: Member, rnd: int) -> bool:
        kind = self.scenario.kind
        if member.attacker:
            if kind == KIND_CONSTANT_ATTACK:
                return False
            if kind in (KIND_BAD_MOUTHING, KIND_WHITEWASHING):
                return rnd >= 2
            if kind == KIND_FALSE_REFUND:
                return rnd == 1
            return True
        # Honest consumers purchase once, in round 1 (round 2 when attackers
        # must be the earliest reviewers).
        first_round = 2 if kind == KIND_MAJORITY_ENDORSER else 1
        return rnd == first_round

    def _rating_for(self, member: Member, service_id: str) -> int:
        quality = self.ground_truth[service_id]
        beacon = self.sim.ledger.beacon
        if not member.attacker:
            return beacon.randint(4, 5) if quality == GOOD else beacon.randint(1, 2)
        if self.scenario.kind == KIND_MAJORITY_ENDORSER:
            return 5  # blend in; the attack happens at endorsement time
        if member.category == UNHAPPY_DISHONEST:
            return 1
        if self.attacker_service is not None and service_id != self.attacker_service:
            return 1  # collusion: trash the competitor
        return 5

    def _purchase_phase(self, rnd: int) -> None:
        for pid in self.consumers:
            member = self.members[pid]
            if self.sim.identity.get(pid).status == STATUS_EXCLUDED:
                self._maybe_whitewash(member)
                continue
            if not self._buys_this_round(member, rnd):
                continue
            for service_id in self._services_for(member):
                try:
                    purchase_id = self.sim.buy_service(pid, service_id)
                except DdrmError as exc:
                    self._deny(exc)
                    continue
                purchase = self.sim.market.purchases[purchase_id]
                if member.attacker:
                    self.spend += self.sim.ledger.gas_cost(OP_REQUEST_SERVICE) + purchase.price_paid
                if self._is_attacker(purchase.consumer) and not self._is_attacker(
                    self.sim.market.get_service(service_id).provider
                ):
                    self.extras["victim_revenue_wei"] += purchase.price_paid
        self._replenish_funds()

    def _maybe_whitewash(self, member: Member) -> None:
        """Excluded attackers try to shed their history with the same card."""
        if self.scenario.kind != KIND_WHITEWASHING or not member.attacker:
            return
        if member.pid in self._whitewash_done:
            return
        self._whitewash_done.add(member.pid)
        for _ in range(self.scenario.fake_identities_per_attacker):
            self.extras["whitewash_reregistrations_attempted"] += 1
            try:
                self.sim.register(member.card, {ROLE_CONSUMER})
                self.extras["whitewash_reregistrations_succeeded"] += 1
            except DdrmError as exc:
                self._deny(exc)

    def _replenish_funds(self) -> None:
        """Providers keep their services reviewable by topping up dry funds."""
        for service_id in sorted(self.ground_truth):
            service = self.sim.market.get_service(service_id)
            provider = service.provider
            if service.status != "Listed" or service.review_fund >= REVIEW_SUBSIDY:
                continue
            if self.sim.identity.get(provider).status == STATUS_EXCLUDED:
                continue
            try:
                self.sim.replenish_fund(provider, service_id, REVIEW_FUND_SEED)
                if self._is_attacker(provider):
                    self.spend += self.sim.ledger.gas_cost(OP_ADD_SERVICE) + REVIEW_FUND_SEED
            except DdrmError as exc:
                self._deny(exc)

    def _review_phase(self, rnd: int) -> None:
        kind = self.scenario.kind
        for pid in self.consumers:
            member = self.members[pid]
            if self.sim.identity.get(pid).status == STATUS_EXCLUDED:
                continue
            if kind == KIND_CONSTANT_ATTACK and member.attacker:
                self._constant_attack_reviews(member)
                continue
            if kind == KIND_FALSE_REFUND and member.attacker:
                continue  # the fraud is the refund claim, not the review
            for purchase_id in sorted(self.sim.market.purchases):
                purchase = self.sim.market.purchases[purchase_id]
                if purchase.consumer != pid or purchase.reviewed:
                    continue
                rating = self._rating_for(member, purchase.service_id)
                digest = text_digest(f"{pid}|{purchase_id}|round {rnd}")
                try:
                    self.sim.submit_review(pid, purchase_id, rating, digest)
                    if member.attacker:
                        self.reviews_accepted += 1
                except DdrmError as exc:
                    self._deny(exc)

    def _constant_attack_reviews(self, member: Member) -> None:
        """Review attempts without any purchase: a foreign id and a bogus id."""
        foreign = next(iter(sorted(self.sim.market.purchases)), None)
        for purchase_id in filter(None, [foreign, "PUR-99999"]):
            try:
                self.sim.submit_review(member.pid, purchase_id, 1, text_digest("fabricated"))
                if member.attacker:
                    self.reviews_accepted += 1
            except DdrmError as exc:
                self._deny(exc)

    # -- endorsement machinery --

    def _endorse_phase(self, rnd: int) -> None:
        self._round_votes = {}
        for service_id in sorted(self.ground_truth):
            roster = self.sim.reviews.rosters.get(service_id, set())
            has_reviews = any(
                r.service_id == service_id for r in self.sim.reviews.reviews.values()
            )
            if not roster and has_reviews:
                try:
                    self.sim.bootstrap_endorsers(service_id)
                    roster = self.sim.reviews.rosters.get(service_id, set())
                except DdrmError as exc:
                    self._deny(exc)
            if not roster:
                continue
            self._round_votes[service_id] = self._cast_votes(service_id, sorted(roster))

    def _vote(self, endorser: str, review, vote: str) -> bool:
        try:
            self.sim.endorse_review(endorser, review.review_id, vote)
        except DdrmError as exc:
            self._deny(exc)
            return False
        if self._is_attacker(endorser):
            self.spend += self.sim.ledger.gas_cost(OP_ENDORSE_REVIEW)
        return True

    def _cast_votes(self, service_id: str, roster: list[str]) -> int:
        """One endorsement wave: attackers first, then coordinated honest votes.

        Honest endorsers never cast a lone vote that would push a review
        over quorum with the wrong majority; they commit to a review only
        when enough of them can vote this phase to (a) reach quorum and
        (b) keep the majority ahead of every attacker SRDT still usable on
        that review. Anything else is left pending for a later, stronger
        roster (rosters regrow through bootstrap after stalled selections).
        """
        pending = self.sim.reviews.pending_reviews(service_id)
        if not pending:
            return 0
        quality = self.ground_truth[service_id]
        quorum = self.protocol.endorsement_quorum
        by_age = sorted(pending, key=lambda r: (r.tick, r.review_id))
        voted = {
            r.review_id: {a.endorser for a in self.sim.reviews.annotations[r.review_id]}
            for r in pending
        }
        cast = 0

        def has_srdt(pid):
            return self.sim.tokens.active_srdt_for(pid, service_id) is not None

        # Wave 1: attackers boost allied reviews up to quorum, or bury the
        # oldest enemy review, depending on the attack's aim.
        allies_first = self.scenario.kind not in _ENEMY_FIRST_KINDS
        for pid in [p for p in roster if self._is_attacker(p)]:
            if not has_srdt(pid):
                continue
            ally_pick = enemy_pick = None
            for review in by_age:
                if pid in voted[review.review_id]:
                    continue
                if self._is_attacker(review.reviewer):
                    if ally_pick is None and review.upvotes + review.downvotes < quorum:
                        ally_pick = review
                elif enemy_pick is None:
                    enemy_pick = review
            choice = (ally_pick or enemy_pick) if allies_first else (enemy_pick or ally_pick)
            if choice is None:
                continue
            vote = VOTE_UP if self._is_attacker(choice.reviewer) else VOTE_DOWN
            if self._vote(pid, choice, vote):
                voted[choice.review_id].add(pid)
                cast += 1

        # Wave 2: honest endorsers, mismatched (suspect) reviews first.
        available = [p for p in roster if not self._is_attacker(p) and has_srdt(p)]
        attacker_pool = [p for p in roster if self._is_attacker(p)]
        suspects = [r for r in by_age if not band_matches(r.rating, quality)]
        ordinary = [r for r in by_age if band_matches(r.rating, quality)]
        for review in suspects + ordinary:
            if not available:
                break
            u, d = review.upvotes, review.downvotes
            total = u + d
            hostile = not band_matches(review.rating, quality)
            a_rem = sum(
                1 for p in attacker_pool if p not in voted[review.review_id] and has_srdt(p)
            )
            if hostile:
                if total >= quorum and d > u:
                    continue  # already badgeable as Fraudulent this round
                needed = max(quorum - total, u + a_rem + 1 - d)
            else:
                if total >= quorum and u > d:
                    continue
                needed = max(quorum - total, d + a_rem + 1 - u)
            if needed <= 0:
                continue
            voters = [p for p in available if p not in voted[review.review_id]]
            if len(voters) < needed:
                continue  # unsafe to start; wait for a stronger roster
            for pid in voters[:needed]:
                truthful = self.sim.ledger.beacon.chance(self.scenario.honest_vote_probability)
                aligned = VOTE_DOWN if hostile else VOTE_UP
                inverted = VOTE_UP if hostile else VOTE_DOWN
                if self._vote(pid, review, aligned if truthful else inverted):
                    voted[review.review_id].add(pid)
                    available.remove(pid)
                    cast += 1
        return cast

    def _selection_phase(self, rnd: int) -> None:
        for service_id in sorted(self.ground_truth):
            pending = self.sim.reviews.pending_reviews(service_id)
            eligible = any(
                r.upvotes + r.downvotes >= self.protocol.endorsement_quorum for r in pending
            )
            roster = self.sim.reviews.rosters.get(service_id, set())
            # A roster that cast nothing against a pending backlog is stuck
            # (hoarding or out of tokens); wipe it so bootstrap can re-seed.
            stalled = bool(roster) and bool(pending) and self._round_votes.get(service_id, 0) == 0
            if eligible or stalled:
                self.sim.run_endorser_selection(service_id)

    # -- refunds --

    def _refund_phase(self, rnd: int) -> None:
        if self.scenario.kind == KIND_FALSE_REFUND and rnd >= 2:
            self._file_false_claims()
        open_claims = [
            cid for cid in sorted(self.sim.reviews.claims)
            if self.sim.reviews.claims[cid].outcome == OUTCOME_OPEN
        ]
        for claim_id in open_claims:
            claim = self.sim.reviews.claims[claim_id]
            purchase = self.sim.market.purchases[claim.purchase_id]
            quality = self.ground_truth[purchase.service_id]
            for voter in claim.panel:
                if voter in claim.votes:
                    continue
                member = self.members.get(voter)
                if member is None:
                    continue
                if member.attacker:
                    vote = VOTE_APPROVE if self._is_attacker(claim.claimant) else VOTE_REJECT
                else:
                    vote = VOTE_APPROVE if quality == BAD else VOTE_REJECT
                try:
                    self.sim.vote_refund(voter, claim_id, vote)
                except DdrmError as exc:
                    self._deny(exc)
                if self.sim.reviews.claims[claim_id].outcome != OUTCOME_OPEN:
                    break
            if self.sim.reviews.claims[claim_id].outcome == OUTCOME_OPEN:
                try:
                    self.sim.settle_refund(claim_id)
                except DdrmError as exc:
                    self._deny(exc)

    def _file_false_claims(self) -> None:
        for pid in self._attackers():
            if self.sim.identity.get(pid).status == STATUS_EXCLUDED:
                continue
            for purchase_id in sorted(self.sim.market.purchases):
                purchase = self.sim.market.purchases[purchase_id]
                if purchase.consumer != pid or purchase_id in self._claims_filed:
                    continue
                try:
                    self.sim.file_refund_claim(pid, purchase_id)
                    self._claims_filed.add(purchase_id)
                except DdrmError as exc:
                    self._deny(exc)  # retried next round while the window allows

    # -- execution and metrics --

    def run(self) -> ScenarioResult:
        self._build_population()
        for rnd in range(1, self.scenario.rounds + 1):
            self._purchase_phase(rnd)
            self.sim.advance_tick()
            self._review_phase(rnd)
            self.sim.advance_tick()
            self._endorse_phase(rnd)
            self.sim.advance_tick()
            self._selection_phase(rnd)
            self.sim.advance_tick()
            self._refund_phase(rnd)
            self.sim.advance_tick()
        self.extras["review_starved_services"] = sorted(
            s.service_id
            for s in self.sim.market.services.values()
            if s.status == "Listed" and s.review_fund < REVIEW_SUBSIDY
        )
        return ScenarioResult(
            scenario=self.scenario,
            metrics=self._live_metrics(),
            extras=self.extras,
            sim=self.sim,
        )

    def _live_metrics(self) -> ScenarioMetrics:
        sim = self.sim
        attackers = set(self._attackers())
        badged = [r for r in sim.reviews.reviews.values() if r.badge != BADGE_PENDING]
        matched = sum(
            1 for r in badged if r.badge == expected_badge(r.rating, self.ground_truth[r.service_id])
        )
        branded = sum(
            1 for r in badged if r.badge == BADGE_FRAUDULENT and r.reviewer in attackers
        )
        exclusions = sum(
            1 for p in sim.identity.participants.values() if p.status == STATUS_EXCLUDED
        )
        refund_fraud = sum(
            1
            for c in sim.reviews.claims.values()
            if c.outcome == OUTCOME_APPROVED and c.claimant in attackers
        )
        dret = sum(sim.tokens.dret_count(pid) for pid in self.target_providers)
        return ScenarioMetrics(
            badge_accuracy=matched / len(badged) if badged else 0.0,
            attacker_spend_wei=self.spend,
            attacker_reviews_accepted=self.reviews_accepted,
            attacker_reviews_branded=branded,
            exclusions=exclusions,
            refund_fraud_approved=refund_fraud,
            provider_dret_delta=dret,
        )


def run_scenario(
    scenario: AttackScenario,
    protocol: ProtocolConfig | None = None,
    default_seed: int = 42,
) -> ScenarioResult:
    """Execute a scenario; a pure function of (scenario fields, seed)."""
    return ScenarioRunner(scenario, protocol, default_seed).run()


def replay_verify(log) -> ScenarioMetrics:
    """Recompute scenario metrics purely from an exported event log.

    Accepts ndjson text or a list of EventRecord. Raises ChainBroken if the
    hash chain does not verify and MalformedEvent on unparseable records.
    This is the independent oracle against run_scenario's live metrics.
    """
    from .errors import MalformedEvent

    if isinstance(log, str):
        records = load_log_lines(log)
    else:
        records = list(log)
        for rec in records:
            if not isinstance(rec, EventRecord):
                raise MalformedEvent(f"not an event record: {rec!r}")
    verify_log_records(records)

    # The setup annotation is appended after the population (it needs the
    # service ids), so locate it first and then fold the whole log.
    attackers: set[str] = set()
    truth: dict[str, str] = {}
    targets: set[str] = set()
    badged: list[dict] = []
    spend = 0
    accepted = 0
    exclusions = 0
    refund_fraud = 0
    dret = 0
    try:
        for rec in records:
            if rec.kind == "ScenarioSetup":
                p = rec.payload
                attackers = set(p["attackers"])
                truth = dict(p["ground_truth"])
                targets = set(p["target_providers"])
                break
        for rec in records:
            p = rec.payload
            kind = rec.kind
            if kind == "GasCharged":
                if p["payer"] in attackers:
                    spend += p["amount_wei"]
            elif kind == "ServicePurchased":
                if p["consumer"] in attackers:
                    spend += p["price_paid_wei"]
            elif kind == "ServiceAdded":
                if p["provider"] in attackers:
                    spend += p["fund_wei"]
            elif kind == "FundReplenished":
                if p["provider"] in attackers:
                    spend += p["amount_wei"]
            elif kind == "ReviewSubmitted":
                if p["reviewer"] in attackers:
                    accepted += 1
            elif kind == "SelectionRun":
                for entry in p["badged"]:
                    badged.append({**entry, "service": p["service"]})
            elif kind == "Excluded":
                exclusions += 1
            elif kind == "RefundSettled":
                if p["outcome"] == OUTCOME_APPROVED and p["consumer"] in attackers:
                    refund_fraud += 1
            elif kind == "DretAwarded":
                if p["provider"] in targets:
                    dret += 1
    except (KeyError, TypeError) as exc:
        raise MalformedEvent(f"event payload missing field: {exc}") from exc

    matched = sum(
        1 for b in badged if b["badge"] == expected_badge(b["rating"], truth[b["service"]])
    )
    branded = sum(
        1 for b in badged if b["badge"] == BADGE_FRAUDULENT and b["reviewer"] in attackers
    )
    return ScenarioMetrics(
        badge_accuracy=matched / len(badged) if badged else 0.0,
        attacker_spend_wei=spend,
        attacker_reviews_accepted=accepted,
        attacker_reviews_branded=branded,
        exclusions=exclusions,
        refund_fraud_approved=refund_fraud,
        provider_dret_delta=dret,
    )
