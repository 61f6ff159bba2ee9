//! Sample means and standard errors.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

/// Mean and standard error of the mean (sample standard deviation / √n).
pub fn mean_stderr(xs: &[f64]) -> MeanStderr {
    let n = xs.len();
    if n == 0 {
        return MeanStderr::default();
    }
    // float `Sum` starts from -0.0; the `+ 0.0` keeps all-zero means unsigned
    let mean = xs.iter().sum::<f64>() / n as f64 + 0.0;
    if n == 1 {
        return MeanStderr {
            mean,
            stderr: 0.0,
            count: 1,
        };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    MeanStderr {
        mean,
        stderr: (var / n as f64).sqrt(),
        count: n,
    }
}

/// Frequency of successes with the binomial standard error.
pub fn proportion(successes: usize, trials: usize) -> MeanStderr {
    if trials == 0 {
        return MeanStderr::default();
    }
    let p = successes as f64 / trials as f64;
    MeanStderr {
        mean: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        count: trials,
    }
}
