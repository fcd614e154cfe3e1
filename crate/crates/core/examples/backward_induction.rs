//! Solving a reachability game by backward induction, and reading the
//! same answer off a single iterated formula.
use subkit::checker::truth_set;
use subkit::games::{simulate, strategy_for, win_ranks, winning_formula, Adversary, Board};
use subkit::kripke::KripkeModel;

fn main() {
    let board = Board::from_model(KripkeModel::fixture("fig2_b1").unwrap()).unwrap();
    let table = win_ranks(&board);
    for (pos, rank) in &table.ranks {
        println!("{pos}: {rank}");
    }
    let f = winning_formula();
    let states = truth_set(board.model(), &f).unwrap();
    println!("{f}\n  holds at {:?}", board.model().names_of(&states));

    for start in &table.win1 {
        let strategy = strategy_for(&board, start).unwrap();
        let out = simulate(&board, start, &strategy, &Adversary::Exhaustive).unwrap();
        println!("from {start}: {strategy:?} wins in {:?} rounds", out.rounds);
    }
}
