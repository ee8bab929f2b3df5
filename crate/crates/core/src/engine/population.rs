/// Agents plus the scheduler's clock.
///
/// Parallel time is accumulated per *segment*, a maximal stretch of
/// interactions during which `n` is constant: the clock reads
/// `segment_start + segment_interactions / n`, so after `i` interactions at a
/// fixed size it is exactly `i / n` with no floating-point drift.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<S> {
    agents: Vec<S>,
    ids: Vec<u64>,
    next_id: u64,
    segment_start: f64,
    segment_interactions: u64,
    interaction_count: u64,
}

impl<S> Population<S> {
    pub fn new(agents: Vec<S>) -> Self {
        let n = agents.len() as u64;
        Self {
            agents,
            ids: (0..n).collect(),
            next_id: n,
            segment_start: 0.0,
            segment_interactions: 0,
            interaction_count: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    #[inline]
    pub fn states(&self) -> &[S] {
        &self.agents
    }

    /// Stable identifiers, parallel to [`Population::states`]. Identifiers are
    /// assigned at creation and never reused.
    #[inline]
    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    #[inline]
    pub fn parallel_time(&self) -> f64 {
        self.segment_start + self.segment_interactions as f64 / self.agents.len() as f64
    }

    #[inline]
    pub fn interaction_count(&self) -> u64 {
        self.interaction_count
    }

    /// Interactions since the population last changed size.
    #[inline]
    pub fn segment_interactions(&self) -> u64 {
        self.segment_interactions
    }

    #[inline]
    pub(crate) fn segment_start(&self) -> f64 {
        self.segment_start
    }

    #[inline]
    pub(crate) fn agents_mut(&mut self) -> &mut [S] {
        &mut self.agents
    }

    #[inline]
    pub(crate) fn tick(&mut self) {
        self.segment_interactions += 1;
        self.interaction_count += 1;
    }

    fn close_segment(&mut self) {
        if !self.agents.is_empty() {
            self.segment_start = self.parallel_time();
        }
        self.segment_interactions = 0;
    }

    pub fn push(&mut self, state: S) -> u64 {
        self.close_segment();
        let id = self.next_id;
        self.next_id += 1;
        self.agents.push(state);
        self.ids.push(id);
        id
    }

    /// Removes the agent at `index` by swapping in the last agent.
    pub fn swap_remove(&mut self, index: usize) -> (u64, S) {
        self.close_segment();
        (self.ids.swap_remove(index), self.agents.swap_remove(index))
    }

    /// Keeps the agents for which `keep[i]` is true, preserving order.
    pub fn retain_mask(&mut self, keep: &[bool]) {
        assert_eq!(keep.len(), self.agents.len());
        self.close_segment();
        let mut flags = keep.iter();
        self.agents.retain(|_| *flags.next().unwrap());
        let mut flags = keep.iter();
        self.ids.retain(|_| *flags.next().unwrap());
    }
}
