use crate::model::{ClientId, ModelVector};

/// All shared models of one global round: who sent what to whom, plus each
/// client's pre-aggregation model.
///
/// Stored as one inbox per receiver, each sorted by sender index, so a
/// receiver's aggregation always sees senders in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundExchange {
    pre_agg: Vec<ModelVector>,
    inboxes: Vec<Vec<(ClientId, ModelVector)>>,
}

impl RoundExchange {
    /// Honest exchange: every client sends its pre-aggregation model to everyone,
    /// including itself.
    pub fn honest(pre_agg: Vec<ModelVector>) -> Self {
        let total = pre_agg.len();
        let inboxes = (0..total)
            .map(|_| {
                pre_agg
                    .iter()
                    .enumerate()
                    .map(|(sender, model)| (ClientId(sender), model.clone()))
                    .collect()
            })
            .collect();
        Self { pre_agg, inboxes }
    }

    pub fn num_clients(&self) -> usize {
        self.pre_agg.len()
    }

    pub fn pre_agg(&self, client: ClientId) -> &ModelVector {
        &self.pre_agg[client.0]
    }

    pub fn pre_agg_models(&self) -> &[ModelVector] {
        &self.pre_agg
    }

    /// The model `sender` sent to `receiver`, if that entry exists.
    pub fn get(&self, sender: ClientId, receiver: ClientId) -> Option<&ModelVector> {
        let inbox = self.inboxes.get(receiver.0)?;
        inbox
            .binary_search_by_key(&sender, |(s, _)| *s)
            .ok()
            .map(|pos| &inbox[pos].1)
    }

    /// Replaces the `sender -> receiver` entry. Self-entries cannot be overwritten.
    pub fn set(&mut self, sender: ClientId, receiver: ClientId, model: ModelVector) {
        assert_ne!(sender, receiver, "self-entry always equals the pre-aggregation model");
        let inbox = &mut self.inboxes[receiver.0];
        match inbox.binary_search_by_key(&sender, |(s, _)| *s) {
            Ok(pos) => inbox[pos].1 = model,
            Err(pos) => inbox.insert(pos, (sender, model)),
        }
    }

    /// Everything `receiver` received, in sender order.
    pub fn inbox(&self, receiver: ClientId) -> &[(ClientId, ModelVector)] {
        &self.inboxes[receiver.0]
    }

    /// Drops every entry for which `keep(sender, receiver)` is false.
    /// Self-entries are always kept.
    pub fn retain(&mut self, mut keep: impl FnMut(ClientId, ClientId) -> bool) {
        for (receiver, inbox) in self.inboxes.iter_mut().enumerate() {
            let receiver = ClientId(receiver);
            inbox.retain(|(sender, _)| *sender == receiver || keep(*sender, receiver));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (ClientId, ClientId, &ModelVector)> {
        self.inboxes.iter().enumerate().flat_map(|(receiver, inbox)| {
            inbox
                .iter()
                .map(move |(sender, model)| (*sender, ClientId(receiver), model))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: f64) -> ModelVector {
        ModelVector::new(vec![v]).unwrap()
    }

    #[test]
    fn honest_exchange_is_complete() {
        let ex = RoundExchange::honest(vec![mv(0.0), mv(1.0), mv(2.0)]);
        assert_eq!(ex.entries().count(), 9);
        for (sender, receiver, model) in ex.entries() {
            assert_eq!(model, ex.pre_agg(sender));
            let _ = receiver;
        }
    }

    #[test]
    fn set_and_retain() {
        let mut ex = RoundExchange::honest(vec![mv(0.0), mv(1.0), mv(2.0)]);
        ex.set(ClientId(2), ClientId(0), mv(9.0));
        assert_eq!(ex.get(ClientId(2), ClientId(0)), Some(&mv(9.0)));
        assert_eq!(ex.get(ClientId(2), ClientId(1)), Some(&mv(2.0)));
        ex.retain(|_, _| false);
        assert_eq!(ex.entries().count(), 3);
        assert_eq!(ex.inbox(ClientId(1)), &[(ClientId(1), mv(1.0))]);
    }
}
