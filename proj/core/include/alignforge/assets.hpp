#pragma once

#include <string>
#include <string_view>

namespace alignforge::assets {

// Versioned prompt templates, embedded from core/assets/ at build time.
// Manifests record prompts_digest() so dataset provenance pins the exact
// template text that produced it.

inline constexpr const char* kSftTemplateId = "sft_v1";
inline constexpr const char* kPoChosenTemplateId = "po_chosen_v1";
inline constexpr const char* kPoRejectedTemplateId = "po_rejected_v1";
inline constexpr const char* kIcaPromptId = "ica_v1";
inline constexpr const char* kBaselinePromptId = "baseline_v1";

std::string_view sft_template();          // uses {context}
std::string_view po_chosen_template();    // uses {q1},{a1},{q2},{a2},{context},{abc_ai_principles}
std::string_view po_rejected_template();
std::string_view ica_preamble();
std::string_view ica_example_preamble();
std::string_view baseline_prompt();
std::string_view principles_json();
std::string_view placeholder_exemplars_json();

// sha256 over all versioned prompt templates (ids + text).
std::string prompts_digest();

}  // namespace alignforge::assets
