// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "famlens/backend.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace famlens {

/// One externalized role prompt. Template files hold a `<<<system>>>` section
/// followed by a `<<<user>>>` section; placeholders are written `{{key}}`.
struct PromptTemplate {
    std::string name;
    std::string system_template;
    std::string user_template;
};

PromptTemplate parse_prompt_template(const std::string& name, const std::string& text);

/// Substitutes placeholders. Every `{{key}}` must be covered by `vars`;
/// a leftover placeholder is a validation error naming template and key.
std::string render_template_text(const std::string& template_name, const std::string& text,
                                 const std::map<std::string, std::string>& vars);

/// Loads every `*.prompt` file in a directory; template name is the filename
/// stem. Immutable after load.
class PromptLibrary {
public:
    explicit PromptLibrary(const std::filesystem::path& dir);

    /// Test constructor.
    static PromptLibrary from_map(std::map<std::string, PromptTemplate> templates);

    const PromptTemplate& get(const std::string& name) const;
    bool contains(const std::string& name) const { return templates_.count(name) > 0; }

    /// Renders both sections into a single-user-message request tagged with
    /// the template name.
    ChatRequest make_request(const std::string& name,
                             const std::map<std::string, std::string>& vars) const;

private:
    PromptLibrary() = default;

    std::map<std::string, PromptTemplate> templates_;
};

} // namespace famlens
