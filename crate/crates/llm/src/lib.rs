//! Bridge between puzzles and chat-completion models: grid text codec,
//! prompt construction, providers (live and mock) and solve/explain calls.

pub mod attempt;
pub mod mock;
pub mod openai;
pub mod prompt;
pub mod provider;
pub mod text;

pub use attempt::{explain, solve, AIAttempt, BridgeError, ParseOutcome};
pub use mock::{MockBehavior, MockProvider, ScriptError};
pub use openai::OpenAiProvider;
pub use prompt::{
    build_explain_prompt, build_solve_prompt, check_examples, Prompt, PromptError, SolveConfig,
    PROMPT_TEMPLATE_VERSION,
};
pub use provider::{
    complete, default_model, ChatRequest, ModelId, ModelInfo, Provider, ProviderError,
    ProviderReply, RawResponse, DEFAULT_MODEL, MODEL_REGISTRY,
};
pub use text::{parse_grid_response, serialize_grid, ParseFailure, ParseFailureReason};
