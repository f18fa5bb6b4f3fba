"""Token lifecycle: single-use semantics, expiry boundaries, DRET awards."""

import pytest

from ddrm import ether, text_digest
from ddrm.errors import TokenExpired, TokenNotActive
from ddrm.identity import ROLE_CONSUMER
from ddrm.tokens import ACTIVE, BURNED, CONSUMED, EXPIRED, PURPOSE_ENDORSEMENT

from conftest import make_sim, provider_and_service, reviewed_purchase


class TestSratLifecycle:
    def test_expiry_set_from_lifetime(self, sim):
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        for _ in range(5):
            sim.advance_tick()
        purchase = sim.buy_service(consumer, service)
        token = sim.tokens.srat_for_purchase(purchase)
        assert token.minted_tick == 5
        assert token.expiry_tick == 105

    def test_burn_is_single_use(self, sim):
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchase = sim.buy_service(consumer, service)
        token = sim.tokens.srat_for_purchase(purchase)
        sim.submit_review(consumer, purchase, 4, text_digest("x"))
        assert token.state == BURNED
        with pytest.raises(TokenNotActive):
            sim.tokens.burn_srat(token.token_id)

    def test_burn_after_expiry_rejected(self):
        sim = make_sim(srat_lifetime=2)
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchase = sim.buy_service(consumer, service)
        token = sim.tokens.srat_for_purchase(purchase)
        sim.advance_tick()
        sim.advance_tick()  # sweep at the expiry tick
        assert token.state == EXPIRED
        with pytest.raises(TokenExpired):
            sim.tokens.burn_srat(token.token_id)

    def test_review_gas_never_touches_consumer(self, sim):
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchase = sim.buy_service(consumer, service)
        balance_after_buy = sim.ledger.balance(consumer)
        sim.submit_review(consumer, purchase, 5, text_digest("x"))
        assert sim.ledger.balance(consumer) == balance_after_buy


class TestExpirySweep:
    def test_sweep_is_inclusive_at_expiry_tick(self):
        sim = make_sim(srat_lifetime=3)
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchase = sim.buy_service(consumer, service)
        token = sim.tokens.srat_for_purchase(purchase)
        for _ in range(2):
            sim.advance_tick()
        assert token.state == ACTIVE
        sim.advance_tick()
        assert sim.ledger.tick == token.expiry_tick
        assert token.state == EXPIRED

    def test_sweep_idempotent_at_same_tick(self):
        sim = make_sim(srat_lifetime=1)
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        sim.buy_service(consumer, service)
        sim.advance_tick()
        assert sim.tokens.expiry_sweep(sim.ledger.tick) == []

    def test_sweep_with_no_tokens(self, sim):
        assert sim.tokens.expiry_sweep(0) == []

    def test_expired_srat_blocks_review(self):
        sim = make_sim(srat_lifetime=1)
        provider, service = provider_and_service(sim)
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchase = sim.buy_service(consumer, service)
        sim.advance_tick()
        from ddrm.errors import NoValidSrat

        with pytest.raises(NoValidSrat):
            sim.submit_review(consumer, purchase, 5, text_digest("late"))


class TestSrdt:
    def _rostered(self, sim, service, card):
        consumer, purchase, review = reviewed_purchase(sim, service, card)
        sim.bootstrap_endorsers(service, 1)
        return consumer, sim.tokens.active_srdt_for(consumer, service)

    def test_bound_to_its_service(self, sim):
        provider, service = provider_and_service(sim)
        other_service = sim.add_service(provider, ether("0.3"))
        consumer, token = self._rostered(sim, service, "cons-0")
        assert token.service_id == service
        assert sim.tokens.active_srdt_for(consumer, other_service) is None

    def test_consume_once(self, sim):
        provider, service = provider_and_service(sim)
        consumer, token = self._rostered(sim, service, "cons-0")
        sim.tokens.consume_srdt(token.token_id, PURPOSE_ENDORSEMENT)
        assert token.state == CONSUMED
        with pytest.raises(TokenNotActive):
            sim.tokens.consume_srdt(token.token_id, PURPOSE_ENDORSEMENT)

    def test_consume_expired_rejected(self):
        sim = make_sim(srdt_lifetime=2)
        provider, service = provider_and_service(sim)
        consumer, token = self._rostered(sim, service, "cons-0")
        sim.advance_tick()
        sim.advance_tick()
        with pytest.raises(TokenExpired):
            sim.tokens.consume_srdt(token.token_id, PURPOSE_ENDORSEMENT)


class TestDret:
    # Quorum 1 keeps badge plumbing out of the way; each roster member's
    # single SRDT up-votes one review and one selection badges the batch.
    def _badge_authentic_reviews(self, sim, service, count, start=0):
        reviews = []
        for i in range(count):
            consumer, purchase, review = reviewed_purchase(sim, service, f"rated-{start}-{i}")
            reviews.append(review)
        if not sim.reviews.rosters.get(service):
            sim.bootstrap_endorsers(service, count)
        roster = sorted(sim.reviews.rosters[service])
        assert len(roster) >= count
        for member, review in zip(roster, reviews):
            sim.endorse_review(member, review, "Up")
        sim.run_endorser_selection(service)

    def test_four_badges_no_award(self):
        sim = make_sim(endorsement_quorum=1)
        provider, service = provider_and_service(sim, ether("0.01"))
        self._badge_authentic_reviews(sim, service, 4)
        assert sim.tokens.dret_count(provider) == 0

    def test_fifth_badge_awards_one(self):
        sim = make_sim(endorsement_quorum=1)
        provider, service = provider_and_service(sim, ether("0.01"))
        self._badge_authentic_reviews(sim, service, 5)
        assert sim.tokens.dret_count(provider) == 1

    def test_ten_badges_award_two(self):
        sim = make_sim(endorsement_quorum=1)
        provider, service = provider_and_service(sim, ether("0.01"))
        self._badge_authentic_reviews(sim, service, 10)
        assert sim.tokens.dret_count(provider) == 2

    def test_interval_configurable(self):
        sim = make_sim(endorsement_quorum=1, dret_interval=2)
        provider, service = provider_and_service(sim, ether("0.01"))
        self._badge_authentic_reviews(sim, service, 4)
        assert sim.tokens.dret_count(provider) == 2

    def test_award_monotone_non_decreasing(self):
        sim = make_sim(endorsement_quorum=1)
        provider, service = provider_and_service(sim, ether("0.01"))
        counts = []
        self._badge_authentic_reviews(sim, service, 6)
        counts.append(sim.tokens.dret_count(provider))
        self._badge_authentic_reviews(sim, service, 5, start=1)
        counts.append(sim.tokens.dret_count(provider))
        assert counts == sorted(counts)
        assert counts[-1] == 2


class TestSupplyIdentity:
    def test_srat_supply_equals_purchases_minus_terminal_states(self, sim):
        provider, service = provider_and_service(sim, ether("0.01"))
        consumer = sim.register("cons", {ROLE_CONSUMER})
        purchases = [sim.buy_service(consumer, service) for _ in range(6)]
        sim.submit_review(consumer, purchases[0], 5, text_digest("a"))
        sim.submit_review(consumer, purchases[1], 4, text_digest("b"))
        counts = sim.tokens.srat_counts()
        assert counts[ACTIVE] == len(purchases) - counts[BURNED] - counts[EXPIRED] - counts["Voided"]
        assert counts[BURNED] == 2
