use std::thread;

use lunes_core::engine::{Executor, Shard};

/// One scoped worker thread per LP for every timestep. Workers meet at the
/// end of the scope, which is the barrier between timesteps.
#[derive(Clone, Copy, Debug, Default)]
pub struct Threaded;

impl Executor for Threaded {
    fn execute<S, F>(&self, shards: &mut [Shard<S>], task: F)
    where
        S: Send,
        F: Fn(&mut Shard<S>) + Sync,
    {
        if shards.len() <= 1 {
            shards.iter_mut().for_each(task);
            return;
        }
        let task = &task;
        thread::scope(|scope| {
            for shard in shards.iter_mut() {
                scope.spawn(move || task(shard));
            }
        });
    }
}
