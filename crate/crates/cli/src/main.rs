mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hldx_core::config::SettingsOverride;
use hldx_core::eval::Method;
use hldx_core::extract::{CompletionMode, PromptVariant};
use hldx_core::segment::SerializationFormat;
use hldx_core::summarize::{RefineOrder, SummarizationStrategy};

use crate::config::BackendFlags;

/// Numeric value extraction from long documents mixing prose and tables.
#[derive(Parser, Debug)]
#[command(name = "hldx", version)]
struct Cli {
    /// JSON config file.
    #[arg(long, global = true, env = config::ENV_CONFIG)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a document into segments.
    Segment {
        doc: PathBuf,
        #[arg(long)]
        format: Option<SerializationFormat>,
        #[arg(long = "max-tokens")]
        max_tokens: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Extract the value of one keyword from a document.
    Extract {
        doc: PathBuf,
        keyword: String,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run a task file and write accuracy reports.
    Evaluate {
        tasks: PathBuf,
        /// Directory holding the documents tasks refer to.
        #[arg(long)]
        docs: Option<PathBuf>,
        #[arg(long, default_value = "hldx-report")]
        out: PathBuf,
        /// Also run a comparison method (`naive`).
        #[arg(long)]
        baseline: Option<Method>,
        /// Comma-separated tolerance levels, e.g. `0,0.001,0.01`.
        #[arg(long)]
        levels: Option<String>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long)]
        json: bool,
    },
    /// Inspect or empty the response cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
        #[arg(long, global = true)]
        cache: Option<PathBuf>,
        #[arg(long, global = true)]
        json: bool,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CacheAction {
    Stats,
    Clear,
}

#[derive(Args, Debug, Clone, Default)]
struct PipelineArgs {
    #[arg(long)]
    format: Option<SerializationFormat>,
    #[arg(long = "max-tokens")]
    max_tokens: Option<usize>,
    #[arg(long = "top-n")]
    top_n: Option<usize>,
    #[arg(long)]
    strategy: Option<SummarizationStrategy>,
    #[arg(long = "refine-order")]
    refine_order: Option<RefineOrder>,
    #[arg(long)]
    variant: Option<PromptVariant>,
    #[arg(long)]
    mode: Option<CompletionMode>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long = "reduce-budget")]
    reduce_budget: Option<usize>,
    #[arg(long = "max-output-tokens")]
    max_output_tokens: Option<u32>,
    #[arg(long = "naive-context-tokens")]
    naive_context_tokens: Option<usize>,
}

impl PipelineArgs {
    fn to_override(&self) -> SettingsOverride {
        SettingsOverride {
            format: self.format,
            max_tokens_per_segment: self.max_tokens,
            top_n: self.top_n,
            strategy: self.strategy,
            refine_order: self.refine_order,
            variant: self.variant,
            mode: self.mode,
            shots: self.shots,
            parallelism: self.parallelism,
            reduce_budget: self.reduce_budget,
            max_output_tokens: self.max_output_tokens,
            naive_context_tokens: self.naive_context_tokens,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
struct BackendArgs {
    /// Answer prompts from a scripted JSONL file instead of the network.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Append every prompt and response to this JSONL file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Response cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Directory of prompt templates.
    #[arg(long)]
    templates: Option<PathBuf>,
}

impl From<BackendArgs> for BackendFlags {
    fn from(a: BackendArgs) -> Self {
        BackendFlags {
            replay: a.replay,
            record: a.record,
            cache: a.cache,
            templates: a.templates,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = config::FileConfig::discover(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Segment {
            doc,
            format,
            max_tokens,
            json,
        } => commands::segment(&cfg, &doc, format, max_tokens, json),
        Command::Extract {
            doc,
            keyword,
            pipeline,
            backend,
            json,
        } => commands::extract(&cfg, &doc, &keyword, &pipeline.to_override(), &backend.into(), json),
        Command::Evaluate {
            tasks,
            docs,
            out,
            baseline,
            levels,
            pipeline,
            backend,
            json,
        } => commands::evaluate(
            &cfg,
            &commands::EvaluateArgs {
                tasks,
                docs,
                out,
                baseline,
                levels,
                cli_settings: pipeline.to_override(),
                json,
            },
            &backend.into(),
        ),
        Command::Cache { action, cache, json } => {
            let flags = BackendFlags {
                cache,
                ..BackendFlags::default()
            };
            match action {
                CacheAction::Stats => commands::cache_stats(&cfg, &flags, json),
                CacheAction::Clear => commands::cache_clear(&cfg, &flags, json),
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
