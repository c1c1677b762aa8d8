def total_score(stores):
    total = 0
    for store in stores:
        total += store.score
    return total
