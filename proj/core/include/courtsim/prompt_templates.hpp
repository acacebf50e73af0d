#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace courtsim {

/// Role prompt templates with {{name}} placeholders. The built-in set mirrors
/// the files shipped under prompts/; a directory of judge.txt, prosecution.txt,
/// defense.txt and adjudicator.txt overrides it.
class PromptTemplateSet {
public:
    static PromptTemplateSet builtin();
    static PromptTemplateSet load_dir(const std::filesystem::path& dir);

    const std::string& judge() const { return judge_; }
    const std::string& prosecution() const { return prosecution_; }
    const std::string& defense() const { return defense_; }
    const std::string& adjudicator() const { return adjudicator_; }

private:
    std::string judge_;
    std::string prosecution_;
    std::string defense_;
    std::string adjudicator_;
};

/// Replace every {{name}} placeholder present in values; unknown placeholders
/// are left untouched.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace courtsim
