//! `spdc counts`: tag-stream simulation and coincidence analysis.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};

use spdc_core::counts::{
    brightness, car, count_coincidences, heralded_g2, klyshko_efficiency, simulate_tag_source,
    CoincidenceStats, Measured, PairStatistics, SourceSim,
};
use spdc_core::io;
use spdc_core::Result;

use crate::context::{fmt_f64, print_summary, Context, OutputFormat};

#[derive(Subcommand)]
pub enum CountsCommand {
    /// Generate time tags from a parametric pair-source model
    Simulate(SimulateArgs),
    /// Count coincidences in a tag file and derive source metrics
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticsChoice {
    /// Poissonian pair number per pulse
    Poisson,
    /// Thermal (single-mode) pair number per pulse
    Thermal,
    /// At most one pair per pulse
    SinglePair,
}

impl StatisticsChoice {
    fn to_core(self) -> PairStatistics {
        match self {
            StatisticsChoice::Poisson => PairStatistics::Poisson,
            StatisticsChoice::Thermal => PairStatistics::Thermal,
            StatisticsChoice::SinglePair => PairStatistics::SinglePair,
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Pair-number distribution per pulse
    #[arg(long, value_enum, default_value_t = StatisticsChoice::Poisson)]
    pub statistics: StatisticsChoice,

    /// Mean pairs per pulse (success probability for single-pair)
    #[arg(long, default_value_t = 0.05)]
    pub mean_pairs: f64,

    /// Signal arm detection efficiency
    #[arg(long, default_value_t = 0.1)]
    pub efficiency_signal: f64,

    /// Idler arm detection efficiency
    #[arg(long, default_value_t = 0.1)]
    pub efficiency_idler: f64,

    /// Dark count rate per signal detector [1/s]
    #[arg(long, default_value_t = 0.0)]
    pub dark_signal_hz: f64,

    /// Dark count rate on the idler detector [1/s]
    #[arg(long, default_value_t = 0.0)]
    pub dark_idler_hz: f64,

    /// Acquisition time [s]
    #[arg(long, default_value_t = 1.0)]
    pub duration_s: f64,

    /// Split the signal arm 50:50 onto two detectors (heralded g2 layout)
    #[arg(long)]
    pub splitter: bool,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Tag file, CSV or binary
    #[arg(long, value_name = "PATH")]
    pub tags: PathBuf,

    /// Coincidence window [ns]; config value otherwise
    #[arg(long, value_name = "NS")]
    pub window_ns: Option<f64>,
}

pub fn run(ctx: &Context, cmd: &CountsCommand) -> Result<()> {
    match cmd {
        CountsCommand::Simulate(args) => simulate(ctx, args),
        CountsCommand::Analyze(args) => analyze(ctx, args),
    }
}

fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<()> {
    let pump = ctx.pump()?;
    let sim = SourceSim {
        statistics: args.statistics.to_core(),
        mean_pairs_per_pulse: args.mean_pairs,
        efficiency_signal: args.efficiency_signal,
        efficiency_idler: args.efficiency_idler,
        dark_rate_signal_hz: args.dark_signal_hz,
        dark_rate_idler_hz: args.dark_idler_hz,
        repetition_rate_hz: pump.repetition_rate_hz,
        duration_s: args.duration_s,
        resolution_s: ctx.run.counts.tick_resolution_ps * 1e-12,
        splitter: args.splitter,
        seed: ctx.seed,
    };
    let streams = simulate_tag_source(&sim)?;

    let mut bytes = Vec::new();
    let name = ctx.flavored("tags");
    match ctx.format {
        OutputFormat::Csv => io::write_tags_csv(&mut bytes, &streams, &ctx.meta())?,
        OutputFormat::Bin => io::write_tags_binary(&mut bytes, &streams, &ctx.meta())?,
    }
    let path = ctx.write_output(&name, &bytes)?;

    let mut pairs: Vec<(&str, String)> = vec![
        ("file", path),
        ("channels", streams.len().to_string()),
        ("duration_s", fmt_f64(args.duration_s)),
        ("seed", ctx.seed.to_string()),
    ];
    // channel ids are 0..n, so the count keys are stable
    let count_keys = ["tags_0", "tags_1", "tags_2"];
    for s in &streams {
        pairs.push((count_keys[s.channel() as usize], s.len().to_string()));
    }
    pairs.push(("config_hash", ctx.config_hash.clone()));
    print_summary(&pairs);
    Ok(())
}

fn metric_entry(label: &str, m: &Result<Measured>) -> Vec<(String, String)> {
    match m {
        Ok(v) => vec![
            (label.to_string(), fmt_f64(v.value)),
            (format!("{label}_err"), fmt_f64(v.error)),
            (format!("{label}_one_sided"), v.one_sided.to_string()),
        ],
        Err(_) => vec![(label.to_string(), "undefined".to_string())],
    }
}

fn stats_table(ctx: &Context, stats: &CoincidenceStats) -> String {
    let mut body = String::new();
    body.push_str("# spdc coincidence report v1\n");
    body.push_str(&format!("# toolkit_version: {}\n", ctx.meta().toolkit_version));
    body.push_str(&format!("# config_hash: {}\n", ctx.config_hash));
    body.push_str(&format!("# window_s: {:e}\n", stats.window_s));
    body.push_str(&format!("# duration_s: {:e}\n", stats.duration_s));
    body.push_str("record,channels,counts,rate_hz,error_hz,one_sided\n");
    for (c, r) in &stats.singles {
        body.push_str(&format!(
            "singles,{c},{},{},{},{}\n",
            r.counts, r.rate_hz, r.error_hz, r.one_sided
        ));
    }
    for (chs, r) in &stats.coincidences {
        let key: Vec<String> = chs.iter().map(|c| c.to_string()).collect();
        body.push_str(&format!(
            "coincidence,{},{},{},{},{}\n",
            key.join("+"),
            r.counts,
            r.rate_hz,
            r.error_hz,
            r.one_sided
        ));
    }
    body
}

fn analyze(ctx: &Context, args: &AnalyzeArgs) -> Result<()> {
    let (streams, _) = io::load_tags(&args.tags)?;
    let window_ns = args.window_ns.unwrap_or(ctx.run.counts.window_ns);
    let window_s = window_ns * 1e-9;

    let mut channels: Vec<u8> = streams.iter().map(|s| s.channel()).collect();
    channels.sort_unstable();
    let combinations: Vec<Vec<u8>> = match channels.as_slice() {
        [a, b] => vec![vec![*a, *b]],
        [a, b, c] => vec![vec![*a, *c], vec![*b, *c], vec![*a, *b, *c]],
        other => {
            return Err(spdc_core::Error::invalid(format!(
                "expected 2 or 3 channels in the tag file, found {}",
                other.len()
            )))
        }
    };
    let stats = count_coincidences(&streams, window_s, &combinations)?;

    let path = ctx.write_output("coincidences.csv", stats_table(ctx, &stats).as_bytes())?;

    let pump = ctx.pump()?;
    let mut pairs: Vec<(String, String)> = vec![
        ("file".to_string(), path),
        ("window_ns".to_string(), fmt_f64(window_ns)),
        (
            "channels".to_string(),
            channels
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("+"),
        ),
    ];
    if channels.len() == 2 {
        pairs.extend(metric_entry("klyshko", &klyshko_efficiency(&stats)));
        pairs.extend(metric_entry("car", &car(&stats, &pump)));
        pairs.extend(metric_entry(
            "brightness_pairs_per_s_per_mw",
            &brightness(&stats, &pump),
        ));
    } else {
        pairs.extend(metric_entry("g2", &heralded_g2(&stats)));
    }
    pairs.push(("config_hash".to_string(), ctx.config_hash.clone()));
    let view: Vec<(&str, String)> = pairs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    print_summary(&view);
    Ok(())
}
