#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>

namespace fixrev {

// Seconds-resolution time source. Injectable so the timestamp-recompressing
// repository fault and the event log are deterministic under test; wall
// clock is the default everywhere else.
class Clock {
  public:
    virtual ~Clock() = default;
    virtual std::int64_t now() = 0;  // unix epoch seconds
};

class SystemClock final : public Clock {
  public:
    std::int64_t now() override {
        return std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
};

// Starts at `start` and advances by `step` on every read. step=0 freezes it.
class SteppingClock final : public Clock {
  public:
    explicit SteppingClock(std::int64_t start, std::int64_t step = 1) : next_(start), step_(step) {}

    std::int64_t now() override {
        std::lock_guard<std::mutex> lock(mu_);
        std::int64_t t = next_;
        next_ += step_;
        return t;
    }

  private:
    std::mutex mu_;
    std::int64_t next_;
    std::int64_t step_;
};

Clock& system_clock();

// ISO-8601 UTC ("2026-08-11T00:00:00Z") for human-facing surfaces; internal
// records keep raw epoch seconds.
std::string iso8601_utc(std::int64_t epoch_seconds);

}  // namespace fixrev
