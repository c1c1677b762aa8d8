def highest_rating(stores):
    best = None
    for store in stores:
        if best is None or store.rating > best:
            best = store.rating
    return best
