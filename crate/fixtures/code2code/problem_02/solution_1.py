def sum_price(songs):
    return sum(song.price for song in songs)
