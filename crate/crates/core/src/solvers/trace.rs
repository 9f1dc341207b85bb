/// Objective values after one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based: the record for `x_k` has `iter = k`.
    pub iter: usize,
    pub objective: f64,
    pub data_term: f64,
    /// `lambda * ||Phi x||_1`
    pub regularizer: f64,
    pub psnr: Option<f64>,
    /// Cumulative seconds since the run started.
    pub seconds: Option<f64>,
}

/// Per-iteration history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    initial_objective: f64,
    initial_psnr: Option<f64>,
    records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn new(initial_objective: f64, initial_psnr: Option<f64>) -> Self {
        Self {
            initial_objective,
            initial_psnr,
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: IterationRecord) {
        debug_assert_eq!(record.iter, self.records.len() + 1);
        self.records.push(record);
    }

    /// `F(x_0)`
    pub fn initial_objective(&self) -> f64 {
        self.initial_objective
    }

    pub fn initial_psnr(&self) -> Option<f64> {
        self.initial_psnr
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Objective after iteration `k` (1-based); `k = 0` gives `F(x_0)`.
    pub fn objective_at(&self, k: usize) -> Option<f64> {
        if k == 0 {
            Some(self.initial_objective)
        } else {
            self.records.get(k - 1).map(|r| r.objective)
        }
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(self.initial_objective, |r| r.objective)
    }

    pub fn final_psnr(&self) -> Option<f64> {
        self.records.last().map_or(self.initial_psnr, |r| r.psnr)
    }

    /// Smallest recorded objective over iterations `1..=len`.
    pub fn min_objective(&self) -> Option<f64> {
        self.records.iter().map(|r| r.objective).reduce(f64::min)
    }

    /// True when the last objective sits more than `rel_tol` above the
    /// running minimum, i.e. the run has turned upward and stayed there.
    pub fn is_diverging(&self, rel_tol: f64) -> bool {
        match self.min_objective() {
            Some(min) => self.final_objective() > min + rel_tol * min.abs(),
            None => false,
        }
    }

    /// Mean seconds per iteration, if timing was recorded.
    pub fn seconds_per_iter(&self) -> Option<f64> {
        let last = self.records.last()?;
        last.seconds.map(|s| s / last.iter as f64)
    }
}
