// Copyright 2026 The popf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POPF_CHANNEL_HPP_
#define POPF_CHANNEL_HPP_

#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "popf/errors.hpp"

namespace popf {

template <typename T>
struct Packet {
    T payload;
    long send_step = 0;
    long deliver_step = 0;
};

/// Constant-delay FIFO: a payload pushed at step k is delivered exactly at
/// step k + delay, in push order. At most one push per step.
template <typename T>
class DelayChannel {
public:
    explicit DelayChannel(int delay) : delay_(delay) {
        if (delay_ < 0) throw ConfigError("DelayChannel: delay must be >= 0");
    }

    int delay() const { return delay_; }
    size_t in_flight() const { return queue_.size(); }

    void push(T payload, long current_step) {
        if (has_pushed_ && current_step <= last_push_step_) {
            throw ProtocolError("DelayChannel: duplicate or out-of-order push at step " +
                                std::to_string(current_step));
        }
        has_pushed_ = true;
        last_push_step_ = current_step;
        queue_.push_back(Packet<T>{std::move(payload), current_step,
                                   current_step + delay_});
    }

    /// The payload due exactly now, or nothing. Packets whose delivery step was
    /// skipped by the caller are dropped, never delivered late.
    std::optional<T> pop(long current_step) {
        while (!queue_.empty() && queue_.front().deliver_step < current_step) {
            queue_.pop_front();
        }
        if (!queue_.empty() && queue_.front().deliver_step == current_step) {
            T out = std::move(queue_.front().payload);
            queue_.pop_front();
            return out;
        }
        return std::nullopt;
    }

private:
    int delay_;
    bool has_pushed_ = false;
    long last_push_step_ = std::numeric_limits<long>::min();
    std::deque<Packet<T>> queue_;
};

}  // namespace popf

#endif  // POPF_CHANNEL_HPP_
