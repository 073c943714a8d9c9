use std::fs;
use std::path::{Path, PathBuf};

use hldx_core::config::{PipelineSettings, SettingsOverride};
use hldx_core::document::Document;
use hldx_core::eval::{load_document, load_tasks, run_benchmark, BenchmarkOptions, DocumentStore, HarnessError, Method, RetaLevels};
use hldx_core::llm::ResponseCache;
use hldx_core::pipeline::{run_pipeline, PipelineContext, PipelineRun};
use hldx_core::segment::{segment_document, SegmentError, SegmenterConfig, SerializationFormat};
use hldx_core::summarize::CallPurpose;
use serde_json::json;

use crate::config::{build_backend, build_embedder, cache_path, load_templates, BackendFlags, FileConfig};
use crate::error::CliError;

fn read_document(path: &Path) -> Result<Document, CliError> {
    load_document(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn settings(cfg: &FileConfig, cli: &SettingsOverride) -> Result<PipelineSettings, CliError> {
    PipelineSettings::resolve(&[&cfg.pipeline, cli]).map_err(CliError::input)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report values serialize")
}

pub fn segment(
    cfg: &FileConfig,
    doc: &Path,
    format: Option<SerializationFormat>,
    max_tokens: Option<usize>,
    json: bool,
) -> Result<(), CliError> {
    let cli = SettingsOverride {
        format,
        max_tokens_per_segment: max_tokens,
        ..SettingsOverride::default()
    };
    let settings = settings(cfg, &cli)?;
    let document = read_document(doc)?;
    let seg_cfg = SegmenterConfig::new(settings.max_tokens_per_segment, settings.format).map_err(CliError::input)?;
    let segments = segment_document(&document, &seg_cfg).map_err(|e| match e {
        SegmentError::EmptyDocument(_) => CliError::input(format!("{}: {e}", doc.display())),
        other => CliError::extraction(other),
    })?;
    if json {
        println!("{}", to_json(&segments));
        return Ok(());
    }
    for s in &segments {
        let sources: Vec<String> = s.source_indices.iter().map(|i| i.to_string()).collect();
        println!("[{}] tokens={} sources={}", s.position, s.token_count, sources.join(","));
        println!("{}", s.text);
        println!();
    }
    Ok(())
}

pub fn extract(
    cfg: &FileConfig,
    doc: &Path,
    keyword: &str,
    cli: &SettingsOverride,
    flags: &BackendFlags,
    json: bool,
) -> Result<(), CliError> {
    let settings = settings(cfg, cli)?;
    let document = read_document(doc)?;
    let templates = load_templates(cfg, flags)?;
    let backend = build_backend(cfg, flags)?;
    let embedder = build_embedder(cfg)?;
    let ctx = PipelineContext {
        backend: backend.as_ref(),
        embedder: embedder.as_ref(),
        templates: &templates,
    };
    let run = run_pipeline(&document, keyword, &settings, &ctx)?;
    if json {
        println!("{}", to_json(&run_json(&document, &settings, &run)));
    } else {
        print_run(&run);
    }
    match &run.value {
        Ok(_) => Ok(()),
        Err(e) => Err(CliError::extraction(e)),
    }
}

fn run_json(doc: &Document, settings: &PipelineSettings, run: &PipelineRun) -> serde_json::Value {
    let (value, error) = match &run.value {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    json!({
        "doc": doc.id,
        "settings": settings,
        "completed_keyword": run.completed_keyword,
        "segment_count": run.segment_count,
        "retrieved": run.retrieved,
        "trace": run.trace,
        "prompt": run.prompt,
        "raw_answer": run.raw_answer,
        "value": value,
        "error": error,
        "llm_calls": run.llm_calls(),
    })
}

fn print_run(run: &PipelineRun) {
    println!("keyword: {}", run.completed_keyword);
    println!("segments: {}", run.segment_count);
    for r in &run.retrieved {
        println!("retrieved: segment {} score {:.4}", r.position, r.score);
    }
    if let Some(trace) = &run.trace {
        let counts: Vec<String> = [CallPurpose::Init, CallPurpose::Refine, CallPurpose::Map, CallPurpose::Reduce]
            .into_iter()
            .filter(|&p| trace.count(p) > 0)
            .map(|p| format!("{p}={}", trace.count(p)))
            .collect();
        println!("summary calls: {}", counts.join(" "));
        println!("summary: {}", trace.final_summary);
    }
    println!("llm calls: {}", run.llm_calls());
    println!("answer: {}", run.raw_answer);
    match &run.value {
        Ok(v) => {
            let pct = if v.is_percent { " (percent)" } else { "" };
            println!("value: {}{pct}", v.magnitude);
        }
        Err(e) => println!("value: error: {e}"),
    }
}

pub struct EvaluateArgs {
    pub tasks: PathBuf,
    pub docs: Option<PathBuf>,
    pub out: PathBuf,
    pub baseline: Option<Method>,
    pub levels: Option<String>,
    pub cli_settings: SettingsOverride,
    pub json: bool,
}

pub fn evaluate(cfg: &FileConfig, args: &EvaluateArgs, flags: &BackendFlags) -> Result<(), CliError> {
    let tasks =
        load_tasks(&args.tasks).map_err(|e| CliError::input(format!("{}: {e}", args.tasks.display())))?;
    let levels = match &args.levels {
        Some(list) => RetaLevels::parse(list).map_err(CliError::input)?,
        None => RetaLevels::standard(),
    };
    let mut methods = vec![Method::Pipeline];
    if let Some(b) = args.baseline {
        if b != Method::Pipeline {
            methods.push(b);
        }
    }
    let docs_dir = args.docs.clone().unwrap_or_else(|| {
        let base = args.tasks.parent().unwrap_or(Path::new(".")).to_path_buf();
        let nested = base.join("docs");
        if nested.is_dir() {
            nested
        } else {
            base
        }
    });
    let store = DocumentStore::Directory(docs_dir);
    let options = BenchmarkOptions {
        levels,
        methods,
        file_settings: cfg.pipeline,
        cli_settings: args.cli_settings,
    };

    let templates = load_templates(cfg, flags)?;
    let backend = build_backend(cfg, flags)?;
    let embedder = build_embedder(cfg)?;
    let ctx = PipelineContext {
        backend: backend.as_ref(),
        embedder: embedder.as_ref(),
        templates: &templates,
    };
    let report = run_benchmark(&tasks, &store, &options, &ctx).map_err(|e| match e {
        HarnessError::Metric(_) => CliError::input(format!("{}: {e}", args.tasks.display())),
        other => CliError::input(other),
    })?;

    let write = |name: &str, text: &str| {
        let path = args.out.join(name);
        fs::write(&path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    };
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out.display())))?;
    write("report.json", &report.to_json())?;
    write("report.txt", &report.to_text())?;
    let timing = json!({ "wall_time_seconds": report.wall_time.as_secs_f64() });
    write("timing.json", &(to_json(&timing) + "\n"))?;

    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
        println!("reports written to {}", args.out.display());
    }
    Ok(())
}

fn open_cache(cfg: &FileConfig, flags: &BackendFlags) -> Result<(PathBuf, ResponseCache), CliError> {
    let path = cache_path(cfg, flags)
        .ok_or_else(|| CliError::input("no cache configured: pass --cache or set cache_path in the config"))?;
    let cache = ResponseCache::open(&path).map_err(CliError::input)?;
    Ok((path, cache))
}

pub fn cache_stats(cfg: &FileConfig, flags: &BackendFlags, json: bool) -> Result<(), CliError> {
    let (path, cache) = open_cache(cfg, flags)?;
    let stats = cache.stats();
    if json {
        println!("{}", to_json(&stats));
    } else {
        println!("cache: {}", path.display());
        println!("entries: {}", stats.entries);
        println!("bytes: {}", stats.file_bytes);
        for (backend, n) in &stats.by_backend {
            println!("  {backend}: {n}");
        }
    }
    Ok(())
}

pub fn cache_clear(cfg: &FileConfig, flags: &BackendFlags, json: bool) -> Result<(), CliError> {
    let (path, cache) = open_cache(cfg, flags)?;
    let removed = cache.len();
    cache.clear().map_err(CliError::input)?;
    if json {
        println!("{}", to_json(&json!({ "cleared": removed })));
    } else {
        println!("cleared {removed} entries from {}", path.display());
    }
    Ok(())
}
