#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>

namespace hammer {

/// Time source shared by the load generator, the block monitor and the mock
/// node. Components that run loops on clock time register as participants;
/// the virtual clock advances only when every registered participant is
/// parked in a sleep, which makes multi-threaded runs deterministic and
/// lets hour-long scenarios finish in wall-clock seconds.
class Clock {
public:
    using ns = std::chrono::nanoseconds;

    virtual ~Clock() = default;

    virtual ns now() const = 0;

    /// Sleeps until `deadline` or until `cancel` returns true (checked on
    /// every wakeup). Returns true when cancelled before the deadline.
    /// A null cancel means sleep to the deadline unconditionally.
    virtual bool sleep_until(ns deadline, const std::function<bool()>& cancel = nullptr) = 0;

    bool sleep_for(ns d, const std::function<bool()>& cancel = nullptr) {
        return sleep_until(now() + d, cancel);
    }

    /// Wakes all sleepers so they re-evaluate their cancel predicates.
    virtual void interrupt() = 0;

    virtual void register_participant() {}
    virtual void unregister_participant() {}

    /// Blocks virtual-time advancement while at least one hold is out, no
    /// matter what the participants do. Holds are counted. No-ops on wall
    /// clocks. Used to pin time across phase transitions (between a worker
    /// pool draining and the next sleeper registering) that would otherwise
    /// let unrelated sleepers advance the clock nondeterministically.
    virtual void freeze() {}
    virtual void unfreeze() {}
};

/// Wall-clock time. Participant registration is a no-op.
class RealClock final : public Clock {
public:
    ns now() const override;
    bool sleep_until(ns deadline, const std::function<bool()>& cancel = nullptr) override;
    void interrupt() override;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    uint64_t interrupt_epoch_ = 0;
};

/// Deterministic test clock starting at t=0. Advances to the earliest
/// pending deadline whenever every registered participant is asleep.
class VirtualClock final : public Clock {
public:
    explicit VirtualClock(ns start = ns{0}) : now_(start) {}

    ns now() const override;
    bool sleep_until(ns deadline, const std::function<bool()>& cancel = nullptr) override;
    void interrupt() override;

    void register_participant() override;
    void unregister_participant() override;

    void freeze() override;
    void unfreeze() override;

private:
    void advance_if_quorum_locked();

    mutable std::mutex mu_;
    std::condition_variable cv_;
    ns now_;
    int participants_ = 0;
    int sleepers_ = 0;
    int freeze_holds_ = 0;
    std::multimap<ns, int> pending_;  // deadline -> sleeper token
};

/// RAII participant registration for threads that drive on clock time.
class ClockParticipant {
public:
    explicit ClockParticipant(Clock& clock) : clock_(clock) { clock_.register_participant(); }
    ~ClockParticipant() { clock_.unregister_participant(); }
    ClockParticipant(const ClockParticipant&) = delete;
    ClockParticipant& operator=(const ClockParticipant&) = delete;

private:
    Clock& clock_;
};

}  // namespace hammer
