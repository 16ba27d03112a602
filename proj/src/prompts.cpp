// SPDX-License-Identifier: Apache-2.0
#include "famlens/prompts.hpp"

#include "famlens/error.hpp"

#include <fstream>
#include <sstream>

namespace famlens {

namespace {

constexpr std::string_view kSystemMarker = "<<<system>>>";
constexpr std::string_view kUserMarker = "<<<user>>>";

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && (text[begin] == '\n' || text[begin] == '\r')) {
        ++begin;
    }
    while (end > begin && (text[end - 1] == '\n' || text[end - 1] == '\r' ||
                           text[end - 1] == ' ' || text[end - 1] == '\t')) {
        --end;
    }
    return std::string(text.substr(begin, end - begin));
}

} // namespace

PromptTemplate parse_prompt_template(const std::string& name, const std::string& text) {
    const auto sys_pos = text.find(kSystemMarker);
    const auto user_pos = text.find(kUserMarker);
    if (sys_pos == std::string::npos || user_pos == std::string::npos || user_pos < sys_pos) {
        throw Error::config("template '" + name +
                            "' must contain a <<<system>>> section followed by <<<user>>>");
    }
    PromptTemplate tpl;
    tpl.name = name;
    const std::size_t sys_begin = sys_pos + kSystemMarker.size();
    tpl.system_template = trim(std::string_view(text).substr(sys_begin, user_pos - sys_begin));
    tpl.user_template = trim(std::string_view(text).substr(user_pos + kUserMarker.size()));
    if (tpl.user_template.empty()) {
        throw Error::config("template '" + name + "' has an empty <<<user>>> section");
    }
    return tpl;
}

std::string render_template_text(const std::string& template_name, const std::string& text,
                                 const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            throw Error::validation("template '" + template_name +
                                    "' has an unterminated placeholder");
        }
        const std::string key = text.substr(open + 2, close - open - 2);
        const auto it = vars.find(key);
        if (it == vars.end()) {
            throw Error::validation("template '" + template_name +
                                    "' placeholder '" + key + "' has no value");
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

PromptLibrary::PromptLibrary(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw Error::config("prompt template directory not found: " + dir.string());
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".prompt") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) {
            throw Error::config("cannot open template file: " + entry.path().string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string name = entry.path().stem().string();
        templates_.emplace(name, parse_prompt_template(name, buf.str()));
    }
    if (templates_.empty()) {
        throw Error::config("no .prompt templates in directory: " + dir.string());
    }
}

PromptLibrary PromptLibrary::from_map(std::map<std::string, PromptTemplate> templates) {
    PromptLibrary lib;
    lib.templates_ = std::move(templates);
    return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw Error::config("no prompt template named '" + name + "'");
    }
    return it->second;
}

ChatRequest PromptLibrary::make_request(const std::string& name,
                                        const std::map<std::string, std::string>& vars) const {
    const PromptTemplate& tpl = get(name);
    ChatRequest req;
    req.system_prompt = render_template_text(name, tpl.system_template, vars);
    req.messages.push_back({ChatMessage::Role::user, render_template_text(name, tpl.user_template, vars)});
    req.tag = name;
    return req;
}

} // namespace famlens
