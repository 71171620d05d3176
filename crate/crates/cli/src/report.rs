//! JSON attack report. The schema is stable so scripts and the acceptance
//! checks can bind to it: top-level run facts plus one entry per pipeline
//! stage in execution order, tagged by "stage".

use descramble_core::{AttackConfig, AttackResult, ScrambleParams, StageRecord};
use serde::Serialize;

#[derive(Serialize, Debug)]
pub struct Report {
    pub params: ParamsInfo,
    pub config: ConfigInfo,
    pub pairs: usize,
    pub wall_ms: f64,
    pub candidate_count: usize,
    pub pairs_survived: usize,
    pub stages: Vec<Stage>,
}

#[derive(Serialize, Debug)]
pub struct ParamsInfo {
    pub modulus: u64,
    pub rounds: usize,
    pub half_width_bits: u32,
}

#[derive(Serialize, Debug)]
pub struct ConfigInfo {
    pub p1_pairs: usize,
    pub cell_exponents: Vec<u32>,
    pub sieve_budget: u64,
    pub stop_when_unique: bool,
    pub seed_bound: Option<u64>,
}

#[derive(Serialize, Debug)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    PolygonSearch {
        pair_index: usize,
        w9_values: Vec<u8>,
        polygon_count: usize,
        full_translates: usize,
        total_area: f64,
        duration_ms: f64,
    },
    CellFilter {
        round: usize,
        other_pair_index: usize,
        exponent: u32,
        pieces_in: usize,
        pieces_out: usize,
        duration_ms: f64,
    },
    Extraction {
        pieces: usize,
        points: usize,
        duration_ms: f64,
    },
    ResponseFilter {
        pair_index: usize,
        candidates_in: usize,
        candidates_out: usize,
        duration_ms: f64,
    },
}

impl From<&StageRecord> for Stage {
    fn from(record: &StageRecord) -> Self {
        match record {
            StageRecord::PolygonSearch {
                pair_index,
                w9_values,
                polygon_count,
                full_translates,
                total_area,
                duration_ms,
            } => Stage::PolygonSearch {
                pair_index: *pair_index,
                w9_values: w9_values.clone(),
                polygon_count: *polygon_count,
                full_translates: *full_translates,
                total_area: *total_area,
                duration_ms: *duration_ms,
            },
            StageRecord::CellFilter {
                round,
                other_pair_index,
                exponent,
                pieces_in,
                pieces_out,
                duration_ms,
            } => Stage::CellFilter {
                round: *round,
                other_pair_index: *other_pair_index,
                exponent: *exponent,
                pieces_in: *pieces_in,
                pieces_out: *pieces_out,
                duration_ms: *duration_ms,
            },
            StageRecord::Extraction {
                pieces,
                points,
                duration_ms,
            } => Stage::Extraction {
                pieces: *pieces,
                points: *points,
                duration_ms: *duration_ms,
            },
            StageRecord::ResponseFilter {
                pair_index,
                candidates_in,
                candidates_out,
                duration_ms,
            } => Stage::ResponseFilter {
                pair_index: *pair_index,
                candidates_in: *candidates_in,
                candidates_out: *candidates_out,
                duration_ms: *duration_ms,
            },
        }
    }
}

pub fn build(
    result: &AttackResult,
    config: &AttackConfig,
    params: &ScrambleParams,
    pairs: usize,
    wall_ms: f64,
) -> Report {
    Report {
        params: ParamsInfo {
            modulus: params.modulus,
            rounds: params.rounds,
            half_width_bits: params.half_width_bits,
        },
        config: ConfigInfo {
            p1_pairs: config.p1_pairs,
            cell_exponents: config.cell_exponents.clone(),
            sieve_budget: config.sieve_budget,
            stop_when_unique: config.stop_when_unique,
            seed_bound: config.seed_bound,
        },
        pairs,
        wall_ms,
        candidate_count: result.candidates.len(),
        pairs_survived: result.candidates.pairs_survived,
        stages: result.stages.iter().map(Stage::from).collect(),
    }
}

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}
