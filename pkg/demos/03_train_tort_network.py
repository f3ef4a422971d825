"""Train networks on tort law and expose a hidden rationale failure.

A network trained on a small balanced sample keeps a high test accuracy
while almost completely ignoring one condition of the rule that generated
its data.  The dedicated test sets make that visible.

Run:  python demos/03_train_tort_network.py   (about a minute)
"""
from rationale_lab import (
    NetworkConfig,
    TrainConfig,
    accuracy,
    condition_table,
    gen_tort,
    train,
)

ITERATIONS = 20_000  # the published budget is 50,000; this keeps the demo short

unique = gen_tort("unique")
regular_test = gen_tort("regular", size=5000, seed=2)
unlawfulness = gen_tort("unlawfulness")
imputability = gen_tort("imputability")


def fit(train_set, tag):
    model = train(
        train_set,
        NetworkConfig(input_width=10, hidden_layers=(24, 6), init_seed=11),
        TrainConfig(iterations=ITERATIONS, shuffle_seed=12),
    )
    print(f"\n{tag}:")
    print(f"  regular test accuracy:  {accuracy(model, regular_test):.4f}")
    print(f"  unique cases:           {accuracy(model, unique):.4f}")
    print(f"  unlawfulness set:       {accuracy(model, unlawfulness):.4f}")
    print(f"  imputability set:       {accuracy(model, imputability):.4f}")
    for name, dataset, cond in (
        ("unlawfulness", unlawfulness, "c3"),
        ("imputability", imputability, "c2"),
    ):
        table = condition_table(model, dataset, cond)
        print(
            f"  mean output on {name:13s} false={table.rows[False].mean_output:.3f} "
            f"true={table.rows[True].mean_output:.3f}   (ideal: 0 / 1)"
        )
    return model


fit(unique, "trained on all 1024 unique cases")
fit(gen_tort("regular", size=500, seed=1), "trained on a 500-case balanced sample")

print(
    "\nNote the last line: with scarce data the mean output on"
    "\nimputability-false cases rises far above 0 even though the regular"
    "\ntest accuracy stays high. The network decides those cases are"
    "\npositive, i.e. it never learned the condition the set isolates."
)
