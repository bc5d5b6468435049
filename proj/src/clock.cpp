#include "hammer/clock.hpp"

namespace hammer {

Clock::ns RealClock::now() const {
    return std::chrono::steady_clock::now().time_since_epoch();
}

bool RealClock::sleep_until(ns deadline, const std::function<bool()>& cancel) {
    std::unique_lock lk(mu_);
    const auto tp = std::chrono::steady_clock::time_point(deadline);
    while (std::chrono::steady_clock::now() < tp) {
        if (cancel && cancel()) return true;
        cv_.wait_until(lk, tp);
    }
    return false;
}

void RealClock::interrupt() {
    {
        std::lock_guard lk(mu_);
        ++interrupt_epoch_;
    }
    cv_.notify_all();
}

Clock::ns VirtualClock::now() const {
    std::lock_guard lk(mu_);
    return now_;
}

void VirtualClock::register_participant() {
    std::lock_guard lk(mu_);
    ++participants_;
}

void VirtualClock::unregister_participant() {
    std::lock_guard lk(mu_);
    --participants_;
    advance_if_quorum_locked();
}

void VirtualClock::interrupt() {
    std::lock_guard lk(mu_);
    cv_.notify_all();
}

void VirtualClock::freeze() {
    std::lock_guard lk(mu_);
    ++freeze_holds_;
}

void VirtualClock::unfreeze() {
    std::lock_guard lk(mu_);
    if (freeze_holds_ > 0) --freeze_holds_;
    advance_if_quorum_locked();
}

// Advances to the earliest pending deadline once every participant is
// asleep and no freeze hold is out. Only moves strictly forward; wakes
// everyone so due sleepers exit.
void VirtualClock::advance_if_quorum_locked() {
    if (freeze_holds_ > 0) return;
    if (sleepers_ < 1 || sleepers_ < participants_ || pending_.empty()) return;
    const ns target = pending_.begin()->first;
    if (target > now_) {
        now_ = target;
        cv_.notify_all();
    }
}

bool VirtualClock::sleep_until(ns deadline, const std::function<bool()>& cancel) {
    std::unique_lock lk(mu_);
    if (cancel && cancel()) return true;
    ++sleepers_;
    const auto entry = pending_.emplace(deadline, 0);
    bool cancelled = false;
    while (now_ < deadline) {
        if (cancel && cancel()) {
            cancelled = true;
            break;
        }
        advance_if_quorum_locked();
        if (now_ >= deadline) break;
        cv_.wait(lk);
    }
    pending_.erase(entry);
    --sleepers_;
    // A departing sleeper can leave the remaining set unanimous again.
    advance_if_quorum_locked();
    return cancelled;
}

}  // namespace hammer
