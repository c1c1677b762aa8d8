def sum_score(stores):
    return sum(store.score for store in stores)
