// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"
#include "famlens/prompts.hpp"

#include <cstddef>

namespace famlens {

/// Shared handle for every prompt-driven agent. Stateless apart from the
/// backend, so concurrent use on distinct inputs is safe.
struct AgentContext {
    ChatProvider& chat;
    const PromptLibrary& prompts;
    int max_repairs = 2;
    std::size_t concurrency_cap = 4;
};

} // namespace famlens
