// find duplicate elements among BFS states at small radius
use thompson_core::growth::*;
use thompson_core::plmap::word_to_plmap;
use thompson_core::word::{Word, Letter};
use std::collections::HashMap;

fn main() {
    // enumerate ball(3) with explicit words
    let gens = [Letter{index:0,sign:1},Letter{index:0,sign:-1},Letter{index:1,sign:1},Letter{index:1,sign:-1}];
    let mut seen: HashMap<Vec<u8>, Word> = HashMap::new();
    let id = ForestDiagram::identity();
    seen.insert(id.key(), Word::empty());
    let mut frontier = vec![(id, Word::empty())];
    for dist in 1..=3 {
        let mut next = Vec::new();
        for (f, w) in &frontier {
            for g in gens {
                let d = f.act_letter(g).unwrap();
                let k = d.key();
                if !seen.contains_key(&k) {
                    let mut nw = vec![g];
                    nw.extend_from_slice(w.letters());
                    let nw = Word::from_letters(nw);
                    seen.insert(k, nw.clone());
                    next.push((d, nw));
                }
            }
        }
        println!("sphere {dist}: {}", next.len());
        frontier = next;
    }
    // group by PLMap
    let mut by_map: HashMap<String, Vec<(String, Word)>> = HashMap::new();
    for (k, w) in &seen {
        let f = word_to_plmap(w);
        let key = format!("{:?}", f);
        by_map.entry(key).or_default().push((String::from_utf8_lossy(k).to_string(), w.clone()));
    }
    for (m, v) in &by_map {
        if v.len() > 1 {
            println!("DUPLICATE element {m}:");
            for (k, w) in v {
                println!("   key={k} word={w}");
            }
        }
    }
}
